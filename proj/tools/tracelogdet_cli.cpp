#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tracelogdet/analysis.hpp"
#include "tracelogdet/error.hpp"
#include "tracelogdet/report.hpp"
#include "tracelogdet/reproduce.hpp"
#include "tracelogdet/spectra.hpp"

using namespace tracelogdet;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct SpectrumArgs {
  std::string family;
  std::size_t n = 1024;
  double kappa = 100.0;
  std::optional<std::uint64_t> seed;
  std::string spectrum_path;
  std::string traces_path;
};

struct SolverArgs {
  int restarts = SolveConfig{}.restarts;
  int max_iter = SolveConfig{}.max_iter;
  unsigned threads = 0;
};

struct OutputArgs {
  std::string out;
  std::string format;  // empty: the subcommand's default

  std::string format_or(const std::string& fallback) const {
    return format.empty() ? fallback : format;
  }
};

void add_spectrum_flags(CLI::App* cmd, SpectrumArgs& a, bool allow_traces) {
  cmd->add_option("--family", a.family, "spectrum family")
      ->check(CLI::IsMember({"geometric", "uniform", "lognormal", "two_point", "two-point", "bimodal",
                             "clustered"}));
  cmd->add_option("--n", a.n, "dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--kappa", a.kappa, "condition number");
  cmd->add_option("--seed", a.seed, "seed for random families");
  cmd->add_option("--spectrum", a.spectrum_path, "spectrum JSON file")->check(CLI::ExistingFile);
  if (allow_traces)
    cmd->add_option("--traces", a.traces_path, "traces CSV file")->check(CLI::ExistingFile);
}

void add_solver_flags(CLI::App* cmd, SolverArgs& a) {
  cmd->add_option("--restarts", a.restarts, "solver restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", a.max_iter, "solver iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", a.threads, "worker threads (0 = automatic)");
}

void add_output_flags(CLI::App* cmd, OutputArgs& a, bool csv) {
  cmd->add_option("--out", a.out, "output file (default stdout)");
  if (csv) cmd->add_option("--format", a.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const OutputArgs& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) fail(ErrorCode::io, "cannot write " + o.out);
  f << text;
}

std::optional<Spectrum> load_spectrum(const SpectrumArgs& a) {
  if (!a.spectrum_path.empty()) return spectrum_from_json(read_file(a.spectrum_path));
  if (a.family.empty()) return std::nullopt;
  return generate(parse_family(a.family), a.n, a.kappa, a.seed);
}

// A spectrum (generated or loaded) or a traces file, whichever the flags name.
PipelineInput load_input(const SpectrumArgs& a, int order) {
  int sources = !a.family.empty() + !a.spectrum_path.empty() + !a.traces_path.empty();
  require(sources == 1, "give exactly one of --family, --spectrum, --traces");
  if (!a.traces_path.empty()) {
    std::ifstream in(a.traces_path);
    if (!in) fail(ErrorCode::io, "cannot open " + a.traces_path);
    return pipeline_input(read_traces_csv(in), a.traces_path);
  }
  return pipeline_input(*load_spectrum(a), order);
}

SolveConfig solver_config(const SolverArgs& a, std::optional<std::uint64_t> seed) {
  SolveConfig cfg;
  cfg.restarts = a.restarts;
  cfg.max_iter = a.max_iter;
  cfg.threads = a.threads;
  cfg.seed = seed.value_or(0);
  return cfg;
}

std::string table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj;
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { obj[t.header[i]] = v; }, row[i]);
    rows.push_back(obj);
  }
  return rows.dump(2) + "\n";
}

std::string render(const Table& t, const std::string& format) {
  if (format == "json") return table_json(t);
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-determinant estimates and certified bounds from trace powers"};
  app.require_subcommand(1);

  SpectrumArgs sa;
  SolverArgs solver;
  OutputArgs out;
  PipelineOptions popt;
  std::string method = "k0m";
  double alpha_re = 0.0, alpha_im = 1.3;
  bool spectrum_floor = false;
  int k = 0;

  auto* gen = app.add_subcommand("gen-spectrum", "write a benchmark spectrum as JSON");
  add_spectrum_flags(gen, sa, false);
  add_output_flags(gen, out, false);

  auto* traces = app.add_subcommand("traces", "write trace powers p_1..p_m as CSV");
  add_spectrum_flags(traces, sa, false);
  traces->add_option("--m", popt.m, "highest trace power")->check(CLI::Range(1, 64));
  add_output_flags(traces, out, false);

  auto* estimate = app.add_subcommand("estimate", "point estimate of K'(0) and log det");
  add_spectrum_flags(estimate, sa, true);
  estimate->add_option("--m", popt.m, "estimator order")->check(CLI::Range(2, 64));
  estimate->add_option("--method", method, "k0m, lognormal_closed, latane, boxcox");
  estimate->add_option("--alpha-re", alpha_re, "Box-Cox exponent, real part");
  estimate->add_option("--alpha-im", alpha_im, "Box-Cox exponent, imaginary part");
  add_output_flags(estimate, out, true);

  auto add_bound_flags = [&](CLI::App* cmd) {
    add_spectrum_flags(cmd, sa, true);
    cmd->add_option("--m", popt.m, "closed-form order")->check(CLI::Range(2, 64));
    cmd->add_option("--k", k, "k-trace order (default m)")->check(CLI::Range(2, 64));
    cmd->add_option("--floor", popt.floor, "absolute lower bound on lambda_min");
    cmd->add_flag("--spectrum-floor", spectrum_floor, "use lambda_min of the spectrum as the floor");
    add_solver_flags(cmd, solver);
  };
  auto* bounds = app.add_subcommand("bounds", "upper and lower bounds on GM/AM");
  add_bound_flags(bounds);
  add_output_flags(bounds, out, true);

  auto* cert = app.add_subcommand("certify", "estimate, bounds and gap diagnostic as one report");
  add_bound_flags(cert);
  cert->add_option("--method", method, "k0m, lognormal_closed, latane, boxcox");
  add_output_flags(cert, out, false);

  std::vector<std::string> radius_families = {"two_point", "log_uniform", "uniform"};
  std::optional<double> p;
  auto* diag = app.add_subcommand("diagnose", "Taylor radius and Box-Cox CV");
  add_spectrum_flags(diag, sa, true);
  diag->add_option("--m", popt.m, "order for the CV diagnostic")->check(CLI::Range(2, 64));
  diag->add_option("--radius-family", radius_families, "families for the Taylor radius");
  diag->add_option("--p", p, "two-point weight");
  add_output_flags(diag, out, false);

  std::vector<double> etas = {0.01};
  int trials = 1000, m_lo = 2;
  auto* noise = app.add_subcommand("noise-sweep", "noise theory against Monte Carlo");
  add_spectrum_flags(noise, sa, false);
  noise->add_option("--m", popt.m, "highest order")->check(CLI::Range(2, 64));
  noise->add_option("--m-min", m_lo, "lowest order")->check(CLI::Range(2, 64));
  noise->add_option("--eta", etas, "relative noise levels");
  noise->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  noise->add_option("--threads", solver.threads, "worker threads (0 = automatic)");
  add_output_flags(noise, out, true);

  std::string target;
  ReproduceOptions ropt;
  auto* repro = app.add_subcommand("reproduce", "regenerate a reference table as CSV");
  repro->add_option("--table", target, "target name")->required()->check(CLI::IsMember(reproduce_targets()));
  repro->add_option("--seed", ropt.seed, "master seed");
  repro->add_option("--trials", ropt.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  repro->add_option("--threads", ropt.threads, "worker threads (0 = automatic)");
  add_output_flags(repro, out, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      require(!sa.family.empty(), "--family is required");
      emit(out, spectrum_to_json(*load_spectrum(sa)) + "\n");
    } else if (traces->parsed()) {
      auto s = load_spectrum(sa);
      require(s.has_value(), "give --family or --spectrum");
      std::ostringstream os;
      write_traces_csv(os, trace_powers(*s, popt.m));
      emit(out, os.str());
    } else if (estimate->parsed()) {
      popt.method = parse_method(method);
      popt.alpha = {alpha_re, alpha_im};
      PipelineInput in = load_input(sa, required_order(popt));
      EstimateStage st = run_estimate(in, popt);
      json j = json::parse(estimate_to_json(st.report));
      if (in.eigenvalues) {
        SpectrumStats truth = exact_stats(make_custom(*in.eigenvalues));
        j["truth"] = {{"kprime0", truth.kprime0},
                      {"logdet", truth.logdet},
                      {"rel_error_pct", (st.report.kprime0_hat - truth.kprime0) / std::abs(truth.kprime0) * 100.0}};
      }
      if (out.format_or("json") == "csv") {
        Table t{{"method", "m", "kprime0_hat", "logdet_hat", "kprime0_true", "rel_error_pct"}, {}};
        std::vector<Cell> row{j["method"].get<std::string>(), static_cast<long long>(st.report.m),
                              st.report.kprime0_hat, *st.report.logdet_hat};
        if (j.contains("truth")) {
          row.emplace_back(j["truth"]["kprime0"].get<double>());
          row.emplace_back(j["truth"]["rel_error_pct"].get<double>());
        } else {
          row.emplace_back(std::string());
          row.emplace_back(std::string());
        }
        t.rows.push_back(std::move(row));
        emit(out, render(t, "csv"));
      } else {
        emit(out, j.dump(2) + "\n");
      }
    } else if (bounds->parsed() || cert->parsed()) {
      if (k > 0) popt.k = k;
      popt.spectrum_floor = spectrum_floor;
      popt.method = parse_method(method);
      popt.solver = solver_config(solver, sa.seed);
      PipelineInput in = load_input(sa, required_order(popt));
      if (cert->parsed()) {
        CertifiedReport r = certify(in, popt);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        emit(out, report_to_json(r) + "\n");
      } else {
        BoundsStage st = run_bounds(in, popt);
        for (const auto& w : st.warnings) std::cerr << "warning: " << w << '\n';
        if (out.format_or("json") == "csv") {
          Table t{{"side", "label", "value"}, {}};
          for (const auto& [label, v] : st.report.upper) t.rows.push_back({std::string("upper"), label, v});
          for (const auto& [label, v] : st.report.lower) t.rows.push_back({std::string("lower"), label, v});
          emit(out, render(t, "csv"));
        } else {
          emit(out, bounds_to_json(st.report) + "\n");
        }
      }
    } else if (diag->parsed()) {
      json j;
      std::optional<double> kappa;
      int sources = !sa.family.empty() + !sa.spectrum_path.empty() + !sa.traces_path.empty();
      if (sources > 0) {
        PipelineInput in = load_input(sa, popt.m);
        if (in.eigenvalues) kappa = in.eigenvalues->back() / in.eigenvalues->front();
        double cv = cv_diagnostic(normalize(in.traces), popt.m);
        j["cv_percent"] = cv;
        j["cv_unreliable"] = cv > 20.0;
      }
      if (!kappa && diag->count("--kappa") > 0) kappa = sa.kappa;
      require(kappa.has_value(), "Taylor radius needs --kappa or a spectrum");
      json radii = json::array();
      for (const auto& name : radius_families) {
        RadiusFamily f = parse_radius_family(name);
        RadiusReport r = taylor_radius(f, *kappa, f == RadiusFamily::two_point ? p : std::nullopt);
        radii.push_back({{"family", std::string(to_string(f))},
                         {"kappa", r.kappa},
                         {"radius", r.radius},
                         {"safe_order", r.safe_order}});
      }
      j["taylor_radius"] = radii;
      emit(out, j.dump(2) + "\n");
    } else if (noise->parsed()) {
      auto s = load_spectrum(sa);
      require(s.has_value(), "give --family or --spectrum");
      require(m_lo <= popt.m, "--m-min exceeds --m");
      std::vector<int> orders;
      for (int m = m_lo; m <= popt.m; ++m) orders.push_back(m);
      Table t = noise_sweep(*s, orders, etas, trials, sa.seed.value_or(0), solver.threads);
      emit(out, render(t, out.format_or("csv")));
    } else if (repro->parsed()) {
      emit(out, render(reproduce(target, ropt), out.format_or("csv")));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
