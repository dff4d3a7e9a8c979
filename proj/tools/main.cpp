// Command-line front end: generate (moduli artifacts), filtrate (cone
// filtrations with caching), verify (theorem proof bundles), audit
// (arithmetic-only re-verification), effective (orthant-plus-relations
// representations), estimate (worst-case facet bounds).
//
// Exit codes: 0 success, 2 configuration/usage error, 3 computation failure,
// 4 failed verification, 5 I/O or artifact-format error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fultoncones/io.hpp"

namespace {

using namespace fulton;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitVerify = 4;
constexpr int kExitIo = 5;

struct Options {
  int n = 0;
  std::string mode = "ambient";
  std::string order = "paper";
  std::string basis = "Bn";
  std::size_t max_steps = static_cast<std::size_t>(-1);
  bool max_steps_set = false;
  int workers = 1;
  std::string out = ".";
  std::string cache;
  std::string format = "table";
  std::string bundle_dir;
  std::string divisor_file;
};

fs::path resolve_cache(const Options& opt) {
  if (!opt.cache.empty()) return opt.cache;
  if (const char* env = std::getenv("FULTONCONES_CACHE"); env && *env) return env;
  return {};
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory " + dir.string());
}

std::vector<BoundaryClass> load_basis(const Options& opt) {
  if (opt.basis == "Bn") return basis_Bn(opt.n);
  ClassListFile f = parse_class_list_text("basis", iodetail::read_text_file(opt.basis), opt.basis);
  if (f.n != opt.n) throw std::invalid_argument("basis file is for n=" + std::to_string(f.n));
  return f.classes;
}

// ---------------------------------------------------------------------------

int cmd_generate(const Options& opt) {
  check_n(opt.n);
  ensure_out_dir(opt.out);
  const std::string tag = "-n" + std::to_string(opt.n);

  AmbientIndex ix = enumerate_classes(opt.n);
  std::vector<LinForm> rels = relation_basis(ix);
  ConeH fnef = fnef_cone(ix);
  std::vector<BoundaryClass> basis = load_basis(opt);
  QuotientCoords qc = quotient_coordinates(ix, basis);

  auto write = [&](const std::string& name, const std::string& text) {
    fs::path p = fs::path(opt.out) / name;
    iodetail::write_text_file(p, text);
    std::cout << "wrote " << p.string() << "\n";
  };
  write("index" + tag + ".txt", render_class_list_text("index", {opt.n, ix.classes}));
  write("relations" + tag + ".txt",
        render_relations_text({opt.n, ix.N(), rels}));
  write("fnef" + tag + ".cone", render_cone_text({opt.n, "ambient", fnef}));
  write("basis" + tag + ".txt", render_class_list_text("basis", {opt.n, basis}));
  write("quotient" + tag + ".txt", render_quotient_text(make_quotient_file(qc)));
  return 0;
}

// ---------------------------------------------------------------------------

std::string render_table(const FiltrationReport& r) {
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"step", "generator", "facets", "gamma"});
  for (const auto& s : r.steps)
    rows.push_back({std::to_string(s.step), s.generator_label, std::to_string(s.facet_count),
                    std::to_string(s.gamma)});
  std::array<std::size_t, 4> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (c) out += "  ";
      out += std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(const FiltrationReport& r) {
  std::string out = "step,facets,gamma\n";
  for (const auto& s : r.steps)
    out += std::to_string(s.step) + "," + std::to_string(s.facet_count) + "," +
           std::to_string(s.gamma) + "\n";
  return out;
}

int cmd_filtrate(const Options& opt) {
  if (opt.mode != "ambient" && opt.mode != "quotient")
    throw std::invalid_argument("--mode must be ambient or quotient");
  if (opt.format != "table" && opt.format != "csv" && opt.format != "structured")
    throw std::invalid_argument("--format must be table, csv, or structured");

  FiltrateRequest req;
  req.n = opt.n;
  req.ambient = opt.mode == "ambient";
  req.max_steps = opt.max_steps;
  req.workers = opt.workers;
  req.cache_dir = resolve_cache(opt);
  if (req.ambient) {
    if (opt.order != "paper")
      throw std::invalid_argument("ambient mode has a fixed generator order (--order paper)");
    if (opt.basis != "Bn")
      throw std::invalid_argument("ambient mode takes no basis file");
  } else {
    req.basis = load_basis(opt);
    if (opt.order == "paper") {
      // default built-in order
    } else if (opt.order == "greedy") {
      req.greedy = true;
    } else {
      ClassListFile f =
          parse_class_list_text("order", iodetail::read_text_file(opt.order), opt.order);
      if (f.n != opt.n) throw std::invalid_argument("order file is for n=" + std::to_string(f.n));
      req.order = f.classes;
    }
  }

  FiltrateRun run = filtrate_cached(req);

  ensure_out_dir(opt.out);
  fs::path report_path =
      fs::path(opt.out) / ("report-n" + std::to_string(opt.n) + "-" + opt.mode + ".txt");
  iodetail::write_text_file(report_path, render_report_text(run.report));

  if (opt.format == "table") std::cout << render_table(run.report);
  else if (opt.format == "csv") std::cout << render_csv(run.report);
  else std::cout << render_report_text(run.report);

  std::cerr << "report written to " << report_path.string() << " (" << run.cache_hits
            << " cached, " << run.steps_computed << " computed)\n";
  if (run.report.budget_exhausted)
    std::cerr << "budget exhausted before containment (final gamma "
              << run.report.steps.back().gamma << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_verify(const Options& opt) {
  if (opt.n < 5 || opt.n > 7)
    throw std::invalid_argument("verify supports n = 5, 6, 7");

  EngineOptions eng;
  eng.workers = opt.workers;
  eng.stop_on_containment = true;

  FiltrationRun run;
  if (opt.n == 5) {
    run = run_ambient_filtration(5, eng);
  } else {
    std::vector<BoundaryClass> basis = load_basis(opt);
    QuotientCoords qc = quotient_coordinates(enumerate_classes(opt.n), basis);
    run = run_quotient_filtration(opt.n, basis, default_quotient_order(qc), eng);
  }

  const ConeH& final_cone = run.cones.back();
  if (!run.report.contained) {
    std::cerr << "containment not reached; violated half-spaces:\n";
    for (auto j : run.report.steps.back().violated)
      std::cerr << "  " << linform_str(final_cone.forms[j]) << "\n";
    return kExitVerify;
  }

  ProofBundle bundle;
  bundle.run = std::move(run);
  bundle.certificates.reserve(final_cone.size());
  for (const auto& f : bundle.run.cones.back().forms) {
    auto it = bundle.run.state.cache.find(f);
    if (it == bundle.run.state.cache.end() || !it->second.bounded ||
        !verify_certificate(bundle.run.inner, it->second.certificate)) {
      std::cerr << "certificate missing or invalid for facet " << linform_str(f) << "\n";
      return kExitVerify;
    }
    bundle.certificates.push_back(it->second.certificate);
  }

  ensure_out_dir(opt.out);
  fs::path dir = fs::path(opt.out) / ("bundle-n" + std::to_string(opt.n));
  write_bundle(dir, bundle);
  std::cout << "contained yes\n";
  std::cout << "certificates " << bundle.certificates.size() << "\n";
  std::cout << "bundle " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_audit(const Options& opt) {
  AuditResult a = audit_bundle(opt.bundle_dir);
  std::cout << a.verified << "/" << a.total << " verified\n";
  for (const auto& f : a.failures) std::cerr << "audit failure: " << f << "\n";
  return a.ok() ? 0 : kExitVerify;
}

// ---------------------------------------------------------------------------

int cmd_effective(const Options& opt) {
  DivisorFile div = parse_divisor_text(iodetail::read_text_file(opt.divisor_file),
                                       opt.divisor_file);
  if (div.n != opt.n)
    throw std::invalid_argument("divisor file is for n=" + std::to_string(div.n));

  AmbientIndex ix = enumerate_classes(opt.n);
  std::vector<LinForm> rels = relation_basis(ix);
  EffectiveFile out;
  out.n = opt.n;
  out.relations = rels.size();
  out.a = div.entries;
  out.rep = effective_representation(ix, div.entries);

  // Independent transcript: re-check both postconditions (or the witness
  // properties) from the file contents alone.
  bool all_ok = true;
  auto add_check = [&](const std::string& name, bool ok) {
    out.checks.emplace_back(name, ok);
    all_ok = all_ok && ok;
  };
  if (out.rep.feasible) {
    bool nonneg = true;
    for (const auto& q : out.rep.b) nonneg = nonneg && sign(q) >= 0;
    add_check("b-nonnegative", nonneg);
    bool span = out.rep.b.size() == out.a.size() && out.rep.t.size() == rels.size();
    if (span)
      for (std::size_t i = 0; i < out.a.size() && span; ++i) {
        Rat acc = out.a[i];
        for (std::size_t m = 0; m < rels.size(); ++m)
          if (rels[m].c[i] != 0) acc += out.rep.t[m] * rat_of(rels[m].c[i]);
        span = acc == out.rep.b[i];
      }
    add_check("b-minus-a-in-relation-span", span);
  } else {
    bool nonneg = true;
    for (const auto& q : out.rep.witness) nonneg = nonneg && sign(q) >= 0;
    add_check("witness-nonnegative", nonneg);
    bool ortho = true;
    for (const auto& r : rels) {
      Rat acc(0);
      for (std::size_t i = 0; i < out.a.size(); ++i)
        if (r.c[i] != 0) acc += out.rep.witness[i] * rat_of(r.c[i]);
      ortho = ortho && sign(acc) == 0;
    }
    add_check("witness-orthogonal-to-relations", ortho);
    Rat dot(0);
    for (std::size_t i = 0; i < out.a.size(); ++i) dot += out.rep.witness[i] * out.a[i];
    add_check("witness-separates", sign(dot) < 0);
  }

  ensure_out_dir(opt.out);
  fs::path p = fs::path(opt.out) / ("effective-n" + std::to_string(opt.n) + ".txt");
  iodetail::write_text_file(p, render_effective_text(out));
  std::cout << "feasible " << (out.rep.feasible ? "yes" : "no") << "\n";
  std::cout << "representation " << p.string() << "\n";
  return all_ok ? 0 : kExitVerify;
}

// ---------------------------------------------------------------------------

int cmd_estimate(const Options& opt) {
  check_n(opt.n);
  if (!opt.max_steps_set)
    throw std::invalid_argument("estimate requires --max-steps (elimination rounds)");
  if (opt.mode != "ambient" && opt.mode != "quotient")
    throw std::invalid_argument("--mode must be ambient or quotient");
  std::size_t start = opt.mode == "ambient" ? dim_Wn(opt.n) : dim_Pic(opt.n);
  Rat bound = worst_case_bound(start, opt.max_steps);
  std::cout << "start " << start << "\n";
  std::cout << "steps " << opt.max_steps << "\n";
  std::cout << "bound " << rat_str(bound) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact polyhedral-cone filtrations for moduli boundary divisors"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_n) {
    auto* n_opt = cmd->add_option("--n", opt.n, "number of marked points");
    if (needs_n) n_opt->required();
    cmd->add_option("--workers", opt.workers, "worker threads for LP scans")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out, "output directory");
    return cmd;
  };

  CLI::App* gen = add_common(app.add_subcommand("generate", "write moduli artifacts"), true);
  gen->add_option("--basis", opt.basis, "Picard basis: Bn or a basis file");

  CLI::App* fil = add_common(app.add_subcommand("filtrate", "run a cone filtration"), true);
  fil->add_option("--mode", opt.mode, "ambient or quotient")->required();
  fil->add_option("--order", opt.order, "paper, greedy, or an order file");
  fil->add_option("--basis", opt.basis, "Picard basis: Bn or a basis file");
  auto* ms_fil = fil->add_option("--max-steps", opt.max_steps, "step budget");
  fil->add_option("--cache", opt.cache, "cache directory (or FULTONCONES_CACHE)");
  fil->add_option("--format", opt.format, "table, csv, or structured");

  CLI::App* ver = add_common(app.add_subcommand("verify", "prove containment, write bundle"), true);
  ver->add_option("--basis", opt.basis, "Picard basis: Bn or a basis file");

  CLI::App* aud = app.add_subcommand("audit", "re-verify a proof bundle arithmetically");
  aud->add_option("bundle", opt.bundle_dir, "bundle directory")->required();

  CLI::App* eff = add_common(app.add_subcommand("effective", "orthant-plus-relations form"), true);
  eff->add_option("divisor", opt.divisor_file, "divisor file")->required();

  CLI::App* est = add_common(app.add_subcommand("estimate", "worst-case facet bound"), true);
  est->add_option("--mode", opt.mode, "ambient or quotient");
  auto* ms_est = est->add_option("--max-steps", opt.max_steps, "elimination rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  opt.max_steps_set = ms_fil->count() > 0 || ms_est->count() > 0;

  try {
    if (gen->parsed()) return cmd_generate(opt);
    if (fil->parsed()) return cmd_filtrate(opt);
    if (ver->parsed()) return cmd_verify(opt);
    if (aud->parsed()) return cmd_audit(opt);
    if (eff->parsed()) return cmd_effective(opt);
    if (est->parsed()) return cmd_estimate(opt);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitConfig;
}
