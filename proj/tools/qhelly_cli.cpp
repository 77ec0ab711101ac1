#include "qhelly.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qhelly;

enum Exit { kPass = 0, kCheckFailed = 1, kMalformed = 2, kNumeric = 3 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedInput:
    case ErrorKind::MalformedCertificate:
    case ErrorKind::CapExceeded:
    case ErrorKind::ZeroNormal:
    case ErrorKind::ZeroPoint:
    case ErrorKind::Unbounded:
    case ErrorKind::Empty:
    case ErrorKind::Degenerate:
      return kMalformed;
    default:
      return kNumeric;
  }
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

HPolytope load_family(const std::string& path, const Tolerances& tol) {
  const auto doc = instance_from_json(read_json_file(path, ErrorKind::MalformedInput));
  return doc.to_polytope(tol);
}

Selector parse_selector(const std::string& s) {
  return s == "pivovarov" ? Selector::Pivovarov : Selector::DvoretzkyRogers;
}

struct Options {
  std::string in, out, selector = "dr", generator;
  std::uint64_t seed = 0;
  std::vector<int> dims{2};
  std::vector<int> ms{6};
  int trials = 1;
  double tol_scale = 1.0;
  double check_scale = 10.0;
  bool oracle = false;
  bool warp = false;
  unsigned threads = 0;
};

int cmd_select(const Options& o) {
  const Tolerances tol = Tolerances{}.scaled(o.tol_scale);
  const auto family = load_family(o.in, tol);
  const auto cert = select(family, {parse_selector(o.selector), o.seed, tol});
  emit(o.out, certificate_to_json(cert).dump(2) + "\n");
  std::cerr << "|G| = " << cert.subfamily.size() << ", ratio = " << cert.ratio << ", bound = " << cert.bound << "\n";
  if (o.oracle) {
    const auto best = oracle_min_subfamily(cert.instance.normalized, 2 * family.dim(), tol);
    if (best.found())
      std::cerr << "oracle ratio = " << best.volume / cert.volume_f << "\n";
    else
      std::cerr << "oracle: no bounded subfamily of size <= " << 2 * family.dim() << "\n";
  }
  return kPass;
}

int cmd_verify(const Options& o) {
  const auto cert = certificate_from_json(read_json_file(o.in, ErrorKind::MalformedCertificate));
  const auto report = check_certificate(cert, o.check_scale);
  emit(o.out, report_to_json(report).dump(2) + "\n");
  for (const auto& item : report.items)
    if (!item.passed) std::cerr << "FAIL " << item.group << "/" << item.name << " slack=" << item.slack << "\n";
  return report.pass() ? kPass : kCheckFailed;
}

int cmd_gen(const Options& o) {
  const int d = o.dims.front();
  InstanceDocument doc;
  if (o.generator == "cube") {
    doc = gen_cube(d);
  } else if (o.generator == "tangent") {
    doc = gen_tangent_random(d, o.ms.front(), o.seed);
  } else {
    if (o.in.empty()) throw Error(ErrorKind::MalformedInput, "warp needs --in");
    doc = gen_affine_warp(instance_from_json(read_json_file(o.in, ErrorKind::MalformedInput)), o.seed);
  }
  emit(o.out, instance_to_json(doc).dump(2) + "\n");
  return kPass;
}

int cmd_experiment(const Options& o) {
  for (int d : o.dims)
    if (d < 1 || d > kMaxDim) throw Error(ErrorKind::CapExceeded, "dimension must be in [1, 8]");
  for (int m : o.ms)
    if (m > kMaxFacets) throw Error(ErrorKind::CapExceeded, "at most 64 half-spaces");
  ExperimentConfig cfg;
  cfg.dims = o.dims;
  cfg.facet_counts = o.ms;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.warp = o.warp;
  cfg.oracle = o.oracle;
  cfg.selector = parse_selector(o.selector);
  cfg.tolerances = Tolerances{}.scaled(o.tol_scale);
  cfg.check_scale = o.check_scale;
  cfg.threads = o.threads;
  const auto rows = run_experiment(cfg);
  std::ostringstream csv;
  write_csv(csv, rows);
  emit(o.out, csv.str());
  int bad = 0;
  for (const auto& r : rows) bad += r.status != "ok";
  std::cerr << rows.size() << " rows, " << bad << " not ok\n";
  return bad ? kCheckFailed : kPass;
}

int cmd_pivovarov(const Options& o) {
  const Tolerances tol = Tolerances{}.scaled(o.tol_scale);
  const auto family = o.in.empty() ? gen_cube(o.dims.front()).to_polytope(tol) : load_family(o.in, tol);
  const auto inst = normalize_position(family, tol);
  const auto& dec = inst.decomposition;
  const int d = family.dim();
  const auto mc = pivovarov_moments(dec, o.trials, o.seed);
  Json report = {{"dim", d},
                 {"trials", mc.trials},
                 {"mean_volume", mc.mean_volume},
                 {"se_mean_volume", mc.se_mean_volume},
                 {"mean_volume_sq", mc.mean_volume_sq},
                 {"se_mean_volume_sq", mc.se_mean_volume_sq},
                 {"rms_volume", mc.rms_volume},
                 {"se_rms_volume", mc.se_rms_volume},
                 {"claimed_expected_volume", simplex_volume_floor(d)}};
  try {
    const auto ex = pivovarov_exact_moments(dec);
    report["exact_mean_volume"] = ex.mean_volume;
    report["exact_rms_volume"] = std::sqrt(ex.mean_volume_sq);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CapExceeded) throw;
  }
  emit(o.out, report.dump(2) + "\n");
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Select at most 2d half-spaces whose intersection has comparable volume, with checkable certificates"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* sel = app.add_subcommand("select", "Run the selection on an instance and write a certificate");
  sel->add_option("--in", o.in, "Instance JSON")->required()->check(CLI::ExistingFile);
  sel->add_option("--out", o.out, "Certificate output (default stdout)");
  sel->add_option("--seed", o.seed, "Seed for the random selector");
  sel->add_option("--selector", o.selector, "dr or pivovarov")->check(CLI::IsMember({"dr", "pivovarov"}));
  sel->add_option("--tol-scale", o.tol_scale, "Multiplier on solver tolerances")->check(CLI::PositiveNumber);
  sel->add_flag("--oracle", o.oracle, "Also report the exhaustive optimum (d <= 3, m <= 12)");

  auto* ver = app.add_subcommand("verify", "Re-check a certificate; exit 0 iff every check passes");
  ver->add_option("--in", o.in, "Certificate JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("--out", o.out, "Report output (default stdout)");
  ver->add_option("--tol-scale", o.check_scale, "Checker tolerance relative to producer tolerances")
      ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("generator", o.generator, "cube, tangent or warp")
      ->required()
      ->check(CLI::IsMember({"cube", "tangent", "warp"}));
  gen->add_option("--d", o.dims, "Dimension")->expected(1);
  gen->add_option("--m", o.ms, "Number of half-spaces (tangent)")->expected(1);
  gen->add_option("--seed", o.seed, "Seed");
  gen->add_option("--in", o.in, "Instance to warp")->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "Instance output (default stdout)");

  auto* exp = app.add_subcommand("experiment", "Run select and verify over a (d, m, seed) grid; CSV out");
  exp->add_option("--d", o.dims, "Dimensions")->expected(1, 8);
  exp->add_option("--m", o.ms, "Half-space counts")->expected(1, 64);
  exp->add_option("--trials", o.trials, "Seeds per (d, m)")->check(CLI::PositiveNumber);
  exp->add_option("--seed", o.seed, "First seed");
  exp->add_option("--selector", o.selector, "dr or pivovarov")->check(CLI::IsMember({"dr", "pivovarov"}));
  exp->add_option("--tol-scale", o.tol_scale, "Multiplier on solver tolerances")->check(CLI::PositiveNumber);
  exp->add_option("--threads", o.threads, "Worker threads (default: all cores)");
  exp->add_flag("--warp", o.warp, "Apply a random affine warp to each instance");
  exp->add_flag("--oracle", o.oracle, "Add the exhaustive optimum ratio (d <= 3, m <= 12)");
  exp->add_option("--out", o.out, "CSV output (default stdout)");

  auto* piv = app.add_subcommand("pivovarov", "Moments of the random simplex volume");
  piv->add_option("--in", o.in, "Instance JSON (default: cube of dimension --d)")->check(CLI::ExistingFile);
  piv->add_option("--d", o.dims, "Cube dimension when --in is absent")->expected(1);
  piv->add_option("--trials", o.trials, "Samples")->check(CLI::PositiveNumber);
  piv->add_option("--seed", o.seed, "Seed");
  piv->add_option("--tol-scale", o.tol_scale, "Multiplier on solver tolerances")->check(CLI::PositiveNumber);
  piv->add_option("--out", o.out, "Report output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kMalformed;
  }

  try {
    if (sel->parsed()) return cmd_select(o);
    if (ver->parsed()) return cmd_verify(o);
    if (gen->parsed()) return cmd_gen(o);
    if (exp->parsed()) return cmd_experiment(o);
    return cmd_pivovarov(o);
  } catch (const PipelineError& e) {
    std::cerr << "error in " << e.stage() << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
