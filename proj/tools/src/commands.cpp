#include "commands.hpp"

#include "funcctl/sim.hpp"
#include "funcctl/synthesis.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace funcctl::cli {

namespace {

using criteria::FunctionalTarget;
using criteria::PropertyReport;
using criteria::SystemTriple;
using synthesis::AugmentationResult;
using synthesis::ControllerDesign;
using synthesis::ObserverDesign;
using synthesis::SeparationClosedLoop;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

// FUNCCTL_TOL overrides the relative rank tolerance from the environment,
// taking precedence over the system file.
void apply_env_tolerance(TolerancePolicy& tol) {
  const char* env = std::getenv("FUNCCTL_TOL");
  if (!env || !*env) return;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0))
    throw ParseError(std::string("FUNCCTL_TOL: cannot parse '") + env + "'");
  tol.relative_rank_tol = v;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw ParseError(out_path + ": cannot open for writing");
  f << text << "\n";
}

void write_tolerances(JsonWriter& w, const TolerancePolicy& tol) {
  w.key("tolerances").begin_object();
  w.key("relative_rank_tol").value(tol.relative_rank_tol);
  w.key("absolute_zero_tol").value(tol.absolute_zero_tol);
  w.key("eigen_match_tol").value(tol.eigen_match_tol);
  w.end_object();
}

void write_evidence(JsonWriter& w, const std::vector<criteria::RankEvidence>& evidence) {
  w.key("ranks_evidence").begin_array();
  for (const auto& e : evidence) {
    w.begin_object();
    w.key("check").value(e.check);
    w.key("rank_lhs").value(static_cast<long>(e.rank_lhs));
    w.key("rank_rhs").value(static_cast<long>(e.rank_rhs));
    w.key("pass").value(e.pass);
    w.key("marginal").value(e.marginal);
    w.end_object();
  }
  w.end_array();
}

void write_attempts(JsonWriter& w, const AugmentationResult& aug) {
  w.key("attempts").begin_array();
  for (const auto& a : aug.attempts) {
    w.begin_object();
    w.key("strategy").value(synthesis::to_string(a.strategy));
    w.key("rows").value(static_cast<long>(a.rows));
    w.key("cond_a").value(a.cond_a);
    w.key("cond_b").value(a.cond_b);
    if (!a.note.empty()) w.key("note").value(a.note);
    w.end_object();
  }
  w.end_array();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConditionsViolated*>(&e) || dynamic_cast<const Uncontrollable*>(&e) ||
      dynamic_cast<const NotFunctionalObservable*>(&e))
    return kExitInfeasible;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
      dynamic_cast<const RankDeficient*>(&e) || dynamic_cast<const UnpairedComplexPole*>(&e) ||
      dynamic_cast<const StepBudgetExceeded*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return kExitInput;
  return 1;
}

// ---------------------------------------------------------------------------
// design pipeline shared by `design` and `simulate`
// ---------------------------------------------------------------------------

struct DesignOutcome {
  ControllerDesign ctrl;
  ObserverDesign obs;
  SeparationClosedLoop loop;
  AugmentationResult ctrl_aug;
  std::string observer_note;
};

[[noreturn]] void fail_augmentation(const AugmentationResult& aug, const char* what) {
  std::ostringstream msg;
  msg << what << "; candidates tried:";
  for (const auto& a : aug.attempts)
    msg << " [" << synthesis::to_string(a.strategy) << ": rows=" << a.rows
        << " cond_a=" << (a.cond_a ? "ok" : "failed") << " cond_b=" << (a.cond_b ? "ok" : "failed")
        << (a.note.empty() ? "" : " (" + a.note + ")") << "]";
  throw ConditionsViolated(msg.str());
}

DesignOutcome run_design_pipeline(const SystemFile& file, const ComplexSpectrum& ctrl_poles,
                                  const ComplexSpectrum& obs_poles, const std::string& augment,
                                  bool allow_unstable) {
  const TolerancePolicy& tol = file.tol;
  synthesis::DesignOptions options{allow_unstable};
  DesignOutcome result;
  const Index n = file.sys.n();

  Matrix R1(0, n);
  Matrix R(0, n);
  if (augment == "none") {
    // keep both empty
  } else if (augment == "file") {
    if (file.R1) R1 = *file.R1;
    R = file.R ? *file.R : R1;
  } else if (augment == "auto") {
    result.ctrl_aug = synthesis::find_controller_augmentation(file.sys, file.target, tol);
    if (!result.ctrl_aug.found)
      fail_augmentation(result.ctrl_aug, "no controller augmentation satisfies both conditions");
    R1 = result.ctrl_aug.R;
    if (R1.rows() > 0) {
      // Shared rows keep the observer estimate compatible with the control law.
      const auto [oa, ob] = synthesis::observer_conditions(file.sys, file.target, R1, tol);
      if (!oa || !ob)
        throw ConditionsViolated(
            std::string("observer conditions fail for R = R1: ") +
            (!oa ? "parameter equation unsolvable" : "poles not freely assignable"));
      R = R1;
      result.observer_note = "R = R1";
    } else {
      const AugmentationResult obs_aug =
          synthesis::find_observer_augmentation(file.sys, file.target, tol);
      if (!obs_aug.found)
        fail_augmentation(obs_aug, "no observer augmentation satisfies both conditions");
      R = obs_aug.R;
      result.observer_note = std::string("R via ") + synthesis::to_string(obs_aug.strategy);
    }
  } else {
    throw ParseError("--augment must be one of none, auto, file");
  }

  result.ctrl =
      synthesis::design_functional_controller(file.sys, file.target, R1, ctrl_poles, tol, options);
  result.obs =
      synthesis::design_functional_observer(file.sys, file.target, R, obs_poles, tol, options);
  result.loop = synthesis::assemble_separation(file.sys, result.ctrl, result.obs, tol);
  return result;
}

std::string design_report_json(const SystemFile& file, const DesignOutcome& d) {
  JsonWriter w;
  w.begin_object();
  w.key("status").value("ok");
  write_tolerances(w, file.tol);

  w.key("augmentation").begin_object();
  w.key("R1").matrix(d.ctrl.R1);
  w.key("R").matrix(d.obs.R);
  if (!d.ctrl_aug.attempts.empty()) {
    w.key("strategy").value(synthesis::to_string(d.ctrl_aug.strategy));
    write_attempts(w, d.ctrl_aug);
  }
  if (!d.observer_note.empty()) w.key("observer_note").value(d.observer_note);
  w.end_object();

  w.key("controller").begin_object();
  w.key("Fbar").matrix(d.ctrl.Fbar);
  w.key("Z").matrix(d.ctrl.Z);
  w.key("reduced_A").matrix(d.ctrl.reduced_A);
  w.key("reduced_B").matrix(d.ctrl.reduced_B);
  w.key("assigned_poles").spectrum(d.ctrl.assigned_poles);
  w.end_object();

  w.key("observer").begin_object();
  w.key("order").value(static_cast<long>(d.obs.order_q));
  w.key("N").matrix(d.obs.N);
  w.key("J").matrix(d.obs.J);
  w.key("H").matrix(d.obs.H);
  w.key("E").matrix(d.obs.E);
  w.key("K").matrix(d.obs.K);
  w.key("assigned_poles").spectrum(d.obs.assigned_poles);
  w.end_object();

  w.key("separation").begin_object();
  w.key("Psi").matrix(d.loop.Psi);
  w.key("A_full").matrix(d.loop.A_full);
  w.key("controller_block_spectrum").spectrum(d.loop.controller_block_spectrum);
  w.key("observer_block_spectrum").spectrum(d.loop.observer_block_spectrum);
  w.key("psi_spectrum").spectrum(d.loop.psi_spectrum);
  w.key("full_spectrum").spectrum(d.loop.full_spectrum);
  w.end_object();

  w.end_object();
  return w.str();
}

// ---------------------------------------------------------------------------
// bundled demonstration systems
// ---------------------------------------------------------------------------

SystemTriple example1_triple() {
  Matrix A = Matrix::Zero(4, 4);
  A.diagonal() << 1, 2, -1, 3;
  Matrix B = Matrix::Zero(4, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  return {A, B, B.transpose()};
}

SystemTriple example2_triple() {
  Matrix A(5, 5);
  A << 0.25, 2.25, 0.75, -0.25, 1.50,
      2.25, 0.25, -0.25, 0.75, -1.50,
      1.75, 1.75, 0.25, 1.25, -0.50,
      -1.25, -1.25, 2.25, 1.25, 0.50,
      0, 0, 0, 0, -4.00;
  Matrix B(5, 1);
  B << 2, 0, 0, 0, 0;
  Matrix C(1, 5);
  C << 1, 1, 0, 0, 0;
  return {A, B, C};
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

void add_scalar_check(std::vector<Check>& checks, const std::string& name, double got,
                      double want, double tolerance) {
  const double diff = std::abs(got - want);
  std::ostringstream detail;
  detail << "got " << format_double(got) << ", want " << format_double(want) << " (|diff| "
         << std::scientific << std::setprecision(2) << diff << ", tol " << tolerance << ")";
  checks.push_back({name, diff <= tolerance, detail.str()});
}

void add_matrix_check(std::vector<Check>& checks, const std::string& name, const Matrix& got,
                      const Matrix& want, double tolerance) {
  const bool shape = got.rows() == want.rows() && got.cols() == want.cols();
  const double diff = shape ? (got - want).cwiseAbs().maxCoeff() : 0.0;
  std::ostringstream detail;
  if (!shape)
    detail << "shape mismatch";
  else
    detail << "max |diff| " << std::scientific << std::setprecision(2) << diff << ", tol "
           << tolerance;
  checks.push_back({name, shape && diff <= tolerance, detail.str()});
}

void add_spectrum_check(std::vector<Check>& checks, const std::string& name,
                        const ComplexSpectrum& got, const ComplexSpectrum& want,
                        double tolerance) {
  const bool pass = spectra_match(got, want, tolerance);
  std::ostringstream detail;
  detail << "{";
  for (std::size_t i = 0; i < got.values.size(); ++i) {
    if (i) detail << ", ";
    detail << got.sorted().values[i].real();
    if (got.sorted().values[i].imag() != 0.0) detail << "+" << got.sorted().values[i].imag() << "i";
  }
  detail << "} vs expected, tol " << tolerance;
  checks.push_back({name, pass, detail.str()});
}

void add_flag_check(std::vector<Check>& checks, const std::string& name, bool got, bool want) {
  checks.push_back({name, got == want,
                    std::string("got ") + (got ? "1" : "0") + ", want " + (want ? "1" : "0")});
}

std::vector<Check> reproduce_example1(const TolerancePolicy& tol) {
  const SystemTriple sys = example1_triple();
  std::vector<Check> checks;
  const std::vector<std::pair<std::string, Vector>> functionals = {
      {"z1", (Vector(4) << 1, 1, 1, 1).finished()},
      {"z2", (Vector(4) << 1, 1, 1, 0).finished()},
      {"z3", (Vector(4) << 1, 1, 0, 0).finished()},
      {"z4", (Vector(4) << 0, 0, 1, 1).finished()}};
  const bool expected[4][3] = {{true, false, false},
                               {true, true, false},
                               {true, true, true},
                               {false, false, false}};
  for (std::size_t i = 0; i < functionals.size(); ++i) {
    FunctionalTarget f{functionals[i].second.transpose()};
    add_flag_check(checks, functionals[i].first + " target output controllable",
                   criteria::is_target_output_controllable(sys, f, tol), expected[i][0]);
    add_flag_check(checks, functionals[i].first + " functional stabilizable",
                   criteria::is_functional_stabilizable(sys, f, tol), expected[i][1]);
    add_flag_check(checks, functionals[i].first + " functional controllable",
                   criteria::is_functional_controllable(sys, f, tol), expected[i][2]);
  }
  return checks;
}

std::vector<Check> reproduce_example2(const TolerancePolicy& tol) {
  const SystemTriple sys = example2_triple();
  FunctionalTarget f{(Matrix(1, 5) << 0.5, 0.5, 0.5, 0.5, 0).finished()};
  std::vector<Check> checks;
  const Matrix empty(0, 5);

  const ControllerDesign ctrl = synthesis::design_functional_controller(
      sys, f, empty, ComplexSpectrum::reals({-3}), tol);
  add_scalar_check(checks, "controller gain Z", ctrl.Z(0, 0), 6.0, 1e-9);
  add_spectrum_check(checks, "closed-loop spectrum of A - B Z F",
                     linalg::eigenvalues(sys.A - sys.B * ctrl.Z * ctrl.Fbar),
                     ComplexSpectrum::reals({-4, -3, -2, -1, 2}), 1e-6);

  ObserverDesign published;
  published.R = empty;
  published.Fbar = f.F;
  published.order_q = 1;
  published.N = (Matrix(1, 1) << -6).finished();
  published.E = (Matrix(1, 1) << 9).finished();
  published.K = (Matrix(1, 1) << -18).finished();
  published.J = (Matrix(1, 1) << -72).finished();
  published.H = (Matrix(1, 1) << -17).finished();
  const auto published_report = synthesis::verify_observer(sys, f, empty, published, tol);
  checks.push_back({"published observer parameters satisfy the defining equations",
                    published_report.pass,
                    "constraint residual " + format_double(published_report.constraint_residual) +
                        ", input map residual " +
                        format_double(published_report.input_map_residual)});

  const ObserverDesign obs = synthesis::design_functional_observer(
      sys, f, empty, ComplexSpectrum::reals({-6}), tol);
  add_scalar_check(checks, "designed observer N", obs.N(0, 0), -6.0, 1e-9);
  const auto own_report = synthesis::verify_observer(sys, f, empty, obs, tol);
  checks.push_back({"designed observer satisfies the defining equations", own_report.pass,
                    "constraint residual " + format_double(own_report.constraint_residual)});

  const SeparationClosedLoop loop = synthesis::assemble_separation(sys, ctrl, obs, tol);
  add_matrix_check(checks, "combined matrix Psi", loop.Psi,
                   (Matrix(2, 2) << -3, 6, 0, -6).finished(), 1e-9);
  return checks;
}

std::vector<Check> reproduce_example3(const TolerancePolicy& tol) {
  const SystemTriple sys = example2_triple();
  FunctionalTarget f{(Matrix(1, 5) << 1.5, 1.5, -0.5, -0.5, 0).finished()};
  std::vector<Check> checks;

  const AugmentationResult aug = synthesis::find_controller_augmentation(sys, f, tol);
  checks.push_back({"augmentation search succeeds", aug.found,
                    aug.found ? std::string("strategy ") + synthesis::to_string(aug.strategy)
                              : "no candidate satisfied both conditions"});
  if (!aug.found) return checks;
  add_matrix_check(checks, "augmentation rows R1 = F A", aug.R,
                   (Matrix(1, 5) << 3.5, 3.5, -0.5, -0.5, 0).finished(), 1e-12);

  const ControllerDesign ctrl = synthesis::design_functional_controller(
      sys, f, aug.R, ComplexSpectrum::reals({-3, -5}), tol);
  add_matrix_check(checks, "controller gain Z", ctrl.Z,
                   (Matrix(1, 2) << -148.5, 65.5).finished(), 1e-6);
  add_matrix_check(checks, "reduced closed loop", ctrl.reduced_A - ctrl.reduced_B * ctrl.Z,
                   (Matrix(2, 2) << 445.5, -195.5, 1033.5, -453.5).finished(), 1e-6);
  add_spectrum_check(checks, "closed-loop spectrum of A - B Z Fbar",
                     linalg::eigenvalues(sys.A - sys.B * ctrl.Z * ctrl.Fbar),
                     ComplexSpectrum::reals({-5, -4, -3, -2, -1}), 1e-6);

  const ObserverDesign obs = synthesis::design_functional_observer(
      sys, f, aug.R, ComplexSpectrum::reals({-6, -7}), tol);
  add_spectrum_check(checks, "observer spectrum", obs.assigned_poles,
                     ComplexSpectrum::reals({-6, -7}), 1e-6);
  add_spectrum_check(checks, "designed N spectrum", linalg::eigenvalues(obs.N),
                     ComplexSpectrum::reals({-6, -7}), 1e-6);

  const SeparationClosedLoop loop = synthesis::assemble_separation(sys, ctrl, obs, tol);
  Matrix psi(4, 4);
  psi << 445.5, -195.5, -445.5, 196.5,
      1033.5, -453.5, -1039.5, 458.5,
      0, 0, -6, 0,
      0, 0, 0, -7;
  add_matrix_check(checks, "combined matrix Psi", loop.Psi, psi, 1e-6);
  return checks;
}

std::string reproduce_report_json(const std::string& example, const std::vector<Check>& checks) {
  JsonWriter w;
  w.begin_object();
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  w.key("status").value(all ? "ok" : "mismatch");
  w.key("example").value(example);
  w.key("checks").begin_array();
  for (const auto& c : checks) {
    w.begin_object();
    w.key("name").value(c.name);
    w.key("pass").value(c.pass);
    w.key("detail").value(c.detail);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SystemFile file = load_system_file(args.input);
    apply_env_tolerance(file.tol);
    const PropertyReport report = criteria::property_report(file.sys, file.target, file.tol);

    JsonWriter w;
    w.begin_object();
    w.key("status").value("ok");
    write_tolerances(w, file.tol);
    w.key("properties").begin_object();
    w.key("controllable").value(report.controllable);
    w.key("stabilizable").value(report.stabilizable);
    w.key("observable").value(report.observable);
    w.key("detectable").value(report.detectable);
    w.key("target_output_controllable").value(report.target_output_controllable);
    w.key("functional_controllable").value(report.functional_controllable);
    w.key("functional_stabilizable").value(report.functional_stabilizable);
    w.key("functional_observable").value(report.functional_observable);
    w.key("functional_detectable").value(report.functional_detectable);
    w.end_object();
    write_evidence(w, report.ranks_evidence);
    w.end_object();
    emit(w.str(), args.out_path, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "analyze: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

void warn_unstable_request(const ComplexSpectrum& ctrl_poles, const ComplexSpectrum& obs_poles,
                           bool allowed, std::ostream& err) {
  if (allowed && (ctrl_poles.max_real() >= 0.0 || obs_poles.max_real() >= 0.0))
    err << "warning: requested poles include nonnegative real parts; the closed loop will not"
           " regulate the functional\n";
}

int cmd_design(const DesignArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SystemFile file = load_system_file(args.input);
    apply_env_tolerance(file.tol);
    const ComplexSpectrum ctrl_poles = parse_pole_list(args.controller_poles);
    const ComplexSpectrum obs_poles = parse_pole_list(args.observer_poles);
    warn_unstable_request(ctrl_poles, obs_poles, args.allow_unstable_poles, err);
    const DesignOutcome outcome = run_design_pipeline(file, ctrl_poles, obs_poles, args.augment,
                                                      args.allow_unstable_poles);
    emit(design_report_json(file, outcome), args.out_path, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "design: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SystemFile file = load_system_file(args.design.input);
    apply_env_tolerance(file.tol);
    const ComplexSpectrum ctrl_poles = parse_pole_list(args.design.controller_poles);
    const ComplexSpectrum obs_poles = parse_pole_list(args.design.observer_poles);
    warn_unstable_request(ctrl_poles, obs_poles, args.design.allow_unstable_poles, err);
    const DesignOutcome outcome = run_design_pipeline(file, ctrl_poles, obs_poles,
                                                      args.design.augment,
                                                      args.design.allow_unstable_poles);

    const Index n = file.sys.n();
    const Index q = outcome.obs.order_q;
    const Vector x0 = args.x0.empty() ? Vector::Ones(n) : parse_vector(args.x0);
    const Vector w0 = args.w0.empty() ? Vector::Zero(q) : parse_vector(args.w0);
    if (x0.size() != n) throw ParseError("--x0 must have n entries");
    if (w0.size() != q) throw ParseError("--w0 must have q entries");

    sim::SimConfig cfg;
    cfg.dt = args.dt;
    cfg.t_final = args.t_final;
    const sim::Trace trace =
        sim::simulate_observer_closed_loop(file.sys, outcome.ctrl, outcome.obs, x0, w0, cfg,
                                           file.tol);

    const Index r = file.target.r();
    const Index m = file.sys.m();
    std::ostringstream csv;
    csv << "t";
    for (Index i = 1; i <= n; ++i) csv << ",x" << i;
    for (Index i = 1; i <= q; ++i) csv << ",w" << i;
    for (Index i = 1; i <= r; ++i) csv << ",z" << i;
    for (Index i = 1; i <= r; ++i) csv << ",zhat" << i;
    for (Index i = 1; i <= q; ++i) csv << ",e" << i;
    for (Index i = 1; i <= m; ++i) csv << ",u" << i;
    csv << "\n";
    const Matrix& z = trace.channel("z");
    const Matrix& zhat = trace.channel("zhat");
    const Matrix& e_ch = trace.channel("err");
    const Matrix& u = trace.channel("u");
    for (Index k = 0; k < trace.samples(); ++k) {
      csv << format_double(trace.times(k));
      for (Index i = 0; i < n + q; ++i) csv << "," << format_double(trace.states(k, i));
      for (Index i = 0; i < r; ++i) csv << "," << format_double(z(k, i));
      for (Index i = 0; i < r; ++i) csv << "," << format_double(zhat(k, i));
      for (Index i = 0; i < q; ++i) csv << "," << format_double(e_ch(k, i));
      for (Index i = 0; i < m; ++i) csv << "," << format_double(u(k, i));
      csv << "\n";
    }
    if (args.out_path.empty()) {
      out << csv.str();
    } else {
      std::ofstream f(args.out_path);
      if (!f) throw ParseError(args.out_path + ": cannot open for writing");
      f << csv.str();
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_reproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const TolerancePolicy tol;
    std::vector<Check> checks;
    if (args.example == "example1")
      checks = reproduce_example1(tol);
    else if (args.example == "example2")
      checks = reproduce_example2(tol);
    else if (args.example == "example3")
      checks = reproduce_example3(tol);
    else
      throw ParseError("reproduce: unknown example '" + args.example +
                       "' (expected example1, example2 or example3)");

    int failed = 0;
    for (const auto& c : checks) {
      out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " -- " << c.detail << "\n";
      if (!c.pass) ++failed;
    }
    out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    if (!args.out_path.empty()) emit(reproduce_report_json(args.example, checks), args.out_path, out);
    return failed == 0 ? kExitOk : 1;
  } catch (const std::exception& e) {
    err << "reproduce: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"funcctl: analysis and design of functional controllers and observers for LTI systems"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Decide controllability/observability properties");
  analyze->add_option("input", analyze_args.input, "system JSON file")->required();
  analyze->add_option("--out", analyze_args.out_path, "write the report to a file");

  DesignArgs design_args;
  auto* design = app.add_subcommand("design", "Design a functional controller and observer");
  design->add_option("input", design_args.input, "system JSON file")->required();
  design->add_option("--controller-poles", design_args.controller_poles,
                     "comma-separated pole list, complex entries as a+bi")->required();
  design->add_option("--observer-poles", design_args.observer_poles, "comma-separated pole list")
      ->required();
  design->add_option("--augment", design_args.augment, "none | auto | file (default auto)");
  design->add_flag("--expert-allow-unstable-poles", design_args.allow_unstable_poles,
                   "permit requested poles with nonnegative real part");
  design->add_option("--out", design_args.out_path, "write the report to a file");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Simulate the observer-based closed loop");
  simulate->add_option("input", sim_args.design.input, "system JSON file")->required();
  simulate->add_option("--controller-poles", sim_args.design.controller_poles)->required();
  simulate->add_option("--observer-poles", sim_args.design.observer_poles)->required();
  simulate->add_option("--augment", sim_args.design.augment, "none | auto | file");
  simulate->add_flag("--expert-allow-unstable-poles", sim_args.design.allow_unstable_poles);
  simulate->add_option("--x0", sim_args.x0, "initial plant state (default: all ones)");
  simulate->add_option("--w0", sim_args.w0, "initial observer state (default: zeros)");
  simulate->add_option("--dt", sim_args.dt, "step size in seconds (default 1e-3)");
  simulate->add_option("--t-final", sim_args.t_final, "horizon in seconds (default 10)");
  simulate->add_option("--out", sim_args.out_path, "write the trace CSV to a file");

  ReproduceArgs repro_args;
  auto* reproduce = app.add_subcommand("reproduce", "Re-derive a bundled demonstration system");
  reproduce->add_option("example", repro_args.example, "example1 | example2 | example3")
      ->required();
  reproduce->add_option("--out", repro_args.out_path, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  if (analyze->parsed()) return cmd_analyze(analyze_args, out, err);
  if (design->parsed()) return cmd_design(design_args, out, err);
  if (simulate->parsed()) return cmd_simulate(sim_args, out, err);
  if (reproduce->parsed()) return cmd_reproduce(repro_args, out, err);
  err << app.help();
  return kExitInput;
}

}  // namespace funcctl::cli
