#pragma once

// Text artifacts and caching. Every artifact is a single self-describing
// text document: first line "fultoncones <kind> <version>", last line
// "end <kind>", all numeric content in the canonical "p/q" rational encoding
// (plain integers when q = 1). Rendering is deterministic byte-for-byte and
// parse(render(x)) = x for every format. Parsers validate syntax strictly and
// report the offending line; semantic checks (certificate validity, facet
// counts) belong to the auditing functions, so that a corrupted-but-parseable
// bundle fails verification rather than parsing.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fultoncones/engine.hpp"

namespace fulton {

// Raised for file-system failures and malformed artifacts.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace iodetail {

constexpr int kFormatVersion = 1;

[[noreturn]] inline void fail(const std::string& where, std::size_t lineno,
                              const std::string& msg) {
  throw io_error(where + ":" + std::to_string(lineno) + ": " + msg);
}

// Line cursor over a parsed document. Line numbers are 1-based for messages.
struct Lines {
  std::string where;
  std::vector<std::string> lines;
  std::size_t pos = 0;

  bool done() const { return pos >= lines.size(); }
  std::size_t lineno() const { return pos; }  // number of the line just taken

  const std::string& take() {
    if (done()) throw io_error(where + ": unexpected end of document");
    return lines[pos++];
  }
};

inline Lines split_lines(std::string where, const std::string& text) {
  Lines L;
  L.where = std::move(where);
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos)
      throw io_error(L.where + ": missing final newline");
    L.lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return L;
}

// Splits on single spaces; empty tokens (leading, trailing, or doubled
// spaces) are rejected to keep the encoding canonical.
inline std::vector<std::string> split_tokens(const Lines& L, const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t sp = s.find(' ', start);
    std::string tok = s.substr(start, sp == std::string::npos ? sp : sp - start);
    if (tok.empty()) fail(L.where, L.lineno(), "empty token in '" + s + "'");
    out.push_back(std::move(tok));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  return out;
}

// "key" or "key <rest>"; returns rest ("" for the bare key).
inline std::string expect_key(Lines& L, const std::string& key) {
  const std::string& line = L.take();
  if (line == key) return "";
  if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
      line[key.size()] == ' ')
    return line.substr(key.size() + 1);
  fail(L.where, L.lineno(), "expected '" + key + " ...', got '" + line + "'");
}

inline void expect_header(Lines& L, const std::string& kind) {
  const std::string want = "fultoncones " + kind + " " + std::to_string(kFormatVersion);
  const std::string& line = L.take();
  if (line != want)
    fail(L.where, L.lineno(), "expected header '" + want + "', got '" + line + "'");
}

inline void expect_footer(Lines& L, const std::string& kind) {
  const std::string want = "end " + kind;
  const std::string& line = L.take();
  if (line != want)
    fail(L.where, L.lineno(), "expected footer '" + want + "', got '" + line + "'");
  if (!L.done()) fail(L.where, L.lineno() + 1, "trailing content after footer");
}

inline std::int64_t tok_i64(const Lines& L, const std::string& tok) {
  if (!valid_int_text(tok)) fail(L.where, L.lineno(), "bad integer '" + tok + "'");
  Int z(tok[0] == '+' ? tok.substr(1) : tok);
  if (!z.fits_slong_p()) fail(L.where, L.lineno(), "integer out of range '" + tok + "'");
  return z.get_si();
}

inline std::size_t tok_u64(const Lines& L, const std::string& tok) {
  std::int64_t v = tok_i64(L, tok);
  if (v < 0) fail(L.where, L.lineno(), "expected nonnegative integer, got '" + tok + "'");
  return static_cast<std::size_t>(v);
}

inline Rat tok_rat(const Lines& L, const std::string& tok) {
  try {
    return rat_parse(tok);
  } catch (const std::invalid_argument& e) {
    fail(L.where, L.lineno(), e.what());
  }
}

inline bool tok_bool(const Lines& L, const std::string& tok) {
  if (tok == "yes") return true;
  if (tok == "no") return false;
  fail(L.where, L.lineno(), "expected yes/no, got '" + tok + "'");
}

inline std::string render_bool(bool b) { return b ? "yes" : "no"; }

inline std::string render_i64s(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::string render_rats(const std::vector<Rat>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += rat_str(v[i]);
  }
  return s;
}

inline std::vector<std::int64_t> parse_i64s(Lines& L, const std::string& rest,
                                            std::size_t want) {
  auto toks = split_tokens(L, rest);
  if (toks.size() != want)
    fail(L.where, L.lineno(),
         "expected " + std::to_string(want) + " entries, got " + std::to_string(toks.size()));
  std::vector<std::int64_t> out(toks.size());
  for (std::size_t i = 0; i < toks.size(); ++i) out[i] = tok_i64(L, toks[i]);
  return out;
}

inline std::vector<Rat> parse_rats(Lines& L, const std::string& rest, std::size_t want) {
  auto toks = split_tokens(L, rest);
  if (toks.size() != want)
    fail(L.where, L.lineno(),
         "expected " + std::to_string(want) + " entries, got " + std::to_string(toks.size()));
  std::vector<Rat> out(toks.size());
  for (std::size_t i = 0; i < toks.size(); ++i) out[i] = tok_rat(L, toks[i]);
  return out;
}

inline int parse_n_field(Lines& L) {
  int n = static_cast<int>(tok_u64(L, expect_key(L, "n")));
  try {
    check_n(n);
  } catch (const std::invalid_argument& e) {
    fail(L.where, L.lineno(), e.what());
  }
  return n;
}

// dim / labels / forms block shared by cone files and step-cache entries.
inline void render_cone_block(std::string& out, const ConeH& c) {
  out += "dim " + std::to_string(c.dim()) + "\n";
  out += "labels";
  for (const auto& l : c.labels) out += " " + l;
  out += "\nforms " + std::to_string(c.size()) + "\n";
  for (const auto& f : c.forms) out += render_i64s(f.c) + "\n";
}

inline ConeH parse_cone_block(Lines& L) {
  std::size_t dim = tok_u64(L, expect_key(L, "dim"));
  auto labels = split_tokens(L, expect_key(L, "labels"));
  if (labels.size() != dim)
    fail(L.where, L.lineno(), "label count does not match dim");
  std::size_t count = tok_u64(L, expect_key(L, "forms"));
  std::vector<LinForm> forms;
  forms.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    forms.push_back(LinForm(parse_i64s(L, L.take(), dim)));
  ConeH c;
  c.labels = std::move(labels);
  c.forms = std::move(forms);
  return c;
}

// Per-step block shared by report manifests and step-cache entries.
inline void render_step_block(std::string& out, const StepRecord& r) {
  out += "step " + std::to_string(r.step) + "\n";
  out += "label " + r.generator_label + "\n";
  if (!r.generator.empty()) out += "generator " + render_i64s(r.generator) + "\n";
  out += "raw " + std::to_string(r.raw_count) + "\n";
  out += "pruned " + render_bool(r.raw_count_pruned) + "\n";
  out += "facets " + std::to_string(r.facet_count) + "\n";
  out += "gamma " + std::to_string(r.gamma) + "\n";
  out += "prev-gamma " + std::to_string(r.prev_gamma) + "\n";
  out += "enlarged " + std::to_string(r.enlarged) + "\n";
  out += "violated " + std::to_string(r.violated.size());
  for (auto j : r.violated) out += " " + std::to_string(j);
  out += "\n";
}

inline StepRecord parse_step_block(Lines& L) {
  StepRecord r;
  r.step = tok_u64(L, expect_key(L, "step"));
  auto label_toks = split_tokens(L, expect_key(L, "label"));
  if (label_toks.size() != 1) fail(L.where, L.lineno(), "label must be one token");
  r.generator_label = label_toks[0];
  if (!L.done() && L.lines[L.pos].rfind("generator ", 0) == 0) {
    auto toks = split_tokens(L, expect_key(L, "generator"));
    r.generator.reserve(toks.size());
    for (const auto& t : toks) r.generator.push_back(tok_i64(L, t));
  }
  r.raw_count = tok_u64(L, expect_key(L, "raw"));
  r.raw_count_pruned = tok_bool(L, expect_key(L, "pruned"));
  r.facet_count = tok_u64(L, expect_key(L, "facets"));
  r.gamma = tok_u64(L, expect_key(L, "gamma"));
  r.prev_gamma = tok_u64(L, expect_key(L, "prev-gamma"));
  r.enlarged = tok_u64(L, expect_key(L, "enlarged"));
  auto vio = split_tokens(L, expect_key(L, "violated"));
  std::size_t vcount = tok_u64(L, vio[0]);
  if (vio.size() != vcount + 1)
    fail(L.where, L.lineno(), "violated count does not match entries");
  r.violated.reserve(vcount);
  for (std::size_t i = 1; i < vio.size(); ++i) {
    std::size_t j = tok_u64(L, vio[i]);
    if (!r.violated.empty() && j <= r.violated.back())
      fail(L.where, L.lineno(), "violated indices must be strictly ascending");
    r.violated.push_back(j);
  }
  if (r.violated.size() != r.gamma)
    fail(L.where, L.lineno(), "gamma does not match violated count");
  return r;
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot read " + p.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failure on " + p.string());
  return text;
}

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw io_error("write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw io_error("cannot rename " + tmp.string() + " to " + p.string());
}

// Two independent FNV-1a streams rendered as 32 hex digits; used for cache
// keys only (collisions merely cause a stale-entry recompute).
inline std::string fnv128_hex(const std::string& s) {
  std::uint64_t h1 = 1469598103934665603ull;
  std::uint64_t h2 = 0xcbf29ce484222325ull ^ 0x9e3779b97f4a7c15ull;
  for (unsigned char b : s) {
    h1 = (h1 ^ b) * 1099511628211ull;
    h2 = (h2 ^ (b + 0x9eull)) * 1099511628211ull;
  }
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h1),
                static_cast<unsigned long long>(h2));
  return std::string(buf);
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Cone files.

struct ConeFile {
  int n = 0;
  std::string space;  // "ambient" | "quotient" | free tag
  ConeH cone;
};

inline std::string render_cone_text(const ConeFile& f) {
  std::string out = "fultoncones cone 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "space " + f.space + "\n";
  iodetail::render_cone_block(out, f.cone);
  out += "end cone\n";
  return out;
}

inline ConeFile parse_cone_text(const std::string& text, const std::string& where = "cone") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "cone");
  ConeFile f;
  f.n = iodetail::parse_n_field(L);
  auto sp = iodetail::split_tokens(L, iodetail::expect_key(L, "space"));
  if (sp.size() != 1) iodetail::fail(L.where, L.lineno(), "space must be one token");
  f.space = sp[0];
  f.cone = iodetail::parse_cone_block(L);
  iodetail::expect_footer(L, "cone");
  return f;
}

// ---------------------------------------------------------------------------
// Certificate files.

struct CertificatesFile {
  int n = 0;
  std::size_t dim = 0;
  std::vector<FarkasCertificate> certificates;
};

inline std::string render_certificates_text(const CertificatesFile& f) {
  std::string out = "fultoncones certificates 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "dim " + std::to_string(f.dim) + "\n";
  out += "count " + std::to_string(f.certificates.size()) + "\n";
  for (std::size_t i = 0; i < f.certificates.size(); ++i) {
    const auto& c = f.certificates[i];
    out += "certificate " + std::to_string(i) + "\n";
    out += "target " + iodetail::render_i64s(c.target.c) + "\n";
    out += "support " + std::to_string(c.support.size()) + "\n";
    for (const auto& [idx, mult] : c.support)
      out += std::to_string(idx) + " " + rat_str(mult) + "\n";
  }
  out += "end certificates\n";
  return out;
}

inline CertificatesFile parse_certificates_text(const std::string& text,
                                                const std::string& where = "certificates") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "certificates");
  CertificatesFile f;
  f.n = iodetail::parse_n_field(L);
  f.dim = iodetail::tok_u64(L, iodetail::expect_key(L, "dim"));
  std::size_t count = iodetail::tok_u64(L, iodetail::expect_key(L, "count"));
  f.certificates.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t idx = iodetail::tok_u64(L, iodetail::expect_key(L, "certificate"));
    if (idx != i) iodetail::fail(L.where, L.lineno(), "certificate index out of order");
    FarkasCertificate c;
    c.target = LinForm(iodetail::parse_i64s(L, iodetail::expect_key(L, "target"), f.dim));
    std::size_t supp = iodetail::tok_u64(L, iodetail::expect_key(L, "support"));
    c.support.reserve(supp);
    for (std::size_t k = 0; k < supp; ++k) {
      auto toks = iodetail::split_tokens(L, L.take());
      if (toks.size() != 2)
        iodetail::fail(L.where, L.lineno(), "support entry must be 'index multiplier'");
      c.support.emplace_back(iodetail::tok_u64(L, toks[0]), iodetail::tok_rat(L, toks[1]));
    }
    f.certificates.push_back(std::move(c));
  }
  iodetail::expect_footer(L, "certificates");
  return f;
}

// ---------------------------------------------------------------------------
// Report manifests (golden-comparison target for filtration runs).

inline std::string render_report_text(const FiltrationReport& r) {
  std::string out = "fultoncones report 1\n";
  out += "n " + std::to_string(r.n) + "\n";
  out += "mode " + r.mode + "\n";
  out += "contained " + iodetail::render_bool(r.contained) + "\n";
  out += "budget-exhausted " + iodetail::render_bool(r.budget_exhausted) + "\n";
  out += "steps " + std::to_string(r.steps.size()) + "\n";
  for (const auto& s : r.steps) iodetail::render_step_block(out, s);
  out += "end report\n";
  return out;
}

inline FiltrationReport parse_report_text(const std::string& text,
                                          const std::string& where = "report") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "report");
  FiltrationReport r;
  r.n = iodetail::parse_n_field(L);
  auto mode = iodetail::split_tokens(L, iodetail::expect_key(L, "mode"));
  if (mode.size() != 1) iodetail::fail(L.where, L.lineno(), "mode must be one token");
  r.mode = mode[0];
  r.contained = iodetail::tok_bool(L, iodetail::expect_key(L, "contained"));
  r.budget_exhausted = iodetail::tok_bool(L, iodetail::expect_key(L, "budget-exhausted"));
  std::size_t steps = iodetail::tok_u64(L, iodetail::expect_key(L, "steps"));
  r.steps.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    StepRecord rec = iodetail::parse_step_block(L);
    if (rec.step != i) iodetail::fail(L.where, L.lineno(), "step index out of order");
    r.steps.push_back(std::move(rec));
  }
  iodetail::expect_footer(L, "report");
  return r;
}

// ---------------------------------------------------------------------------
// Divisor files (input to the effective-representation command).

struct DivisorFile {
  int n = 0;
  std::vector<Rat> entries;
};

inline std::string render_divisor_text(const DivisorFile& f) {
  std::string out = "fultoncones divisor 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "dim " + std::to_string(f.entries.size()) + "\n";
  out += "entries " + iodetail::render_rats(f.entries) + "\n";
  out += "end divisor\n";
  return out;
}

inline DivisorFile parse_divisor_text(const std::string& text,
                                      const std::string& where = "divisor") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "divisor");
  DivisorFile f;
  f.n = iodetail::parse_n_field(L);
  std::size_t dim = iodetail::tok_u64(L, iodetail::expect_key(L, "dim"));
  f.entries = iodetail::parse_rats(L, iodetail::expect_key(L, "entries"), dim);
  iodetail::expect_footer(L, "divisor");
  return f;
}

// ---------------------------------------------------------------------------
// Effective-representation files: b, t, and the verification transcript, or
// the separating witness.

struct EffectiveFile {
  int n = 0;
  std::size_t relations = 0;
  std::vector<Rat> a;
  EffectiveRepresentation rep;
  std::vector<std::pair<std::string, bool>> checks;  // transcript: name, passed
};

inline std::string render_effective_text(const EffectiveFile& f) {
  std::string out = "fultoncones effective 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "dim " + std::to_string(f.a.size()) + "\n";
  out += "relations " + std::to_string(f.relations) + "\n";
  out += "feasible " + iodetail::render_bool(f.rep.feasible) + "\n";
  out += "a " + iodetail::render_rats(f.a) + "\n";
  if (f.rep.feasible) {
    out += "t " + iodetail::render_rats(f.rep.t) + "\n";
    out += "b " + iodetail::render_rats(f.rep.b) + "\n";
  } else {
    out += "witness " + iodetail::render_rats(f.rep.witness) + "\n";
  }
  for (const auto& [name, ok] : f.checks)
    out += "check " + name + " " + (ok ? "ok" : "FAILED") + "\n";
  out += "end effective\n";
  return out;
}

inline EffectiveFile parse_effective_text(const std::string& text,
                                          const std::string& where = "effective") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "effective");
  EffectiveFile f;
  f.n = iodetail::parse_n_field(L);
  std::size_t dim = iodetail::tok_u64(L, iodetail::expect_key(L, "dim"));
  f.relations = iodetail::tok_u64(L, iodetail::expect_key(L, "relations"));
  f.rep.feasible = iodetail::tok_bool(L, iodetail::expect_key(L, "feasible"));
  f.a = iodetail::parse_rats(L, iodetail::expect_key(L, "a"), dim);
  if (f.rep.feasible) {
    f.rep.t = iodetail::parse_rats(L, iodetail::expect_key(L, "t"), f.relations);
    f.rep.b = iodetail::parse_rats(L, iodetail::expect_key(L, "b"), dim);
  } else {
    f.rep.witness = iodetail::parse_rats(L, iodetail::expect_key(L, "witness"), dim);
  }
  while (!L.done() && L.lines[L.pos].compare(0, 6, "check ") == 0) {
    auto toks = iodetail::split_tokens(L, iodetail::expect_key(L, "check"));
    if (toks.size() != 2) iodetail::fail(L.where, L.lineno(), "check must be 'name ok|FAILED'");
    if (toks[1] != "ok" && toks[1] != "FAILED")
      iodetail::fail(L.where, L.lineno(), "check result must be ok or FAILED");
    f.checks.emplace_back(toks[0], toks[1] == "ok");
  }
  iodetail::expect_footer(L, "effective");
  return f;
}

// ---------------------------------------------------------------------------
// Class-list files: the ambient index ("index"), a Picard basis ("basis"),
// and a quotient step order ("order") share one shape.

struct ClassListFile {
  int n = 0;
  std::vector<BoundaryClass> classes;
};

inline std::string render_class_list_text(const std::string& kind, const ClassListFile& f) {
  std::string out = "fultoncones " + kind + " 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "count " + std::to_string(f.classes.size()) + "\n";
  for (const auto& c : f.classes) out += c.label() + "\n";
  out += "end " + kind + "\n";
  return out;
}

inline ClassListFile parse_class_list_text(const std::string& kind, const std::string& text,
                                           const std::string& where = "") {
  iodetail::Lines L = iodetail::split_lines(where.empty() ? kind : where, text);
  iodetail::expect_header(L, kind);
  ClassListFile f;
  f.n = iodetail::parse_n_field(L);
  std::size_t count = iodetail::tok_u64(L, iodetail::expect_key(L, "count"));
  f.classes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& line = L.take();
    try {
      f.classes.push_back(parse_class_label(f.n, line));
    } catch (const std::exception& e) {
      iodetail::fail(L.where, L.lineno(), e.what());
    }
  }
  iodetail::expect_footer(L, kind);
  return f;
}

// ---------------------------------------------------------------------------
// Relation-basis files.

struct RelationsFile {
  int n = 0;
  std::size_t dim = 0;
  std::vector<LinForm> rows;
};

inline std::string render_relations_text(const RelationsFile& f) {
  std::string out = "fultoncones relations 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "dim " + std::to_string(f.dim) + "\n";
  out += "count " + std::to_string(f.rows.size()) + "\n";
  for (const auto& r : f.rows) out += iodetail::render_i64s(r.c) + "\n";
  out += "end relations\n";
  return out;
}

inline RelationsFile parse_relations_text(const std::string& text,
                                          const std::string& where = "relations") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "relations");
  RelationsFile f;
  f.n = iodetail::parse_n_field(L);
  f.dim = iodetail::tok_u64(L, iodetail::expect_key(L, "dim"));
  std::size_t count = iodetail::tok_u64(L, iodetail::expect_key(L, "count"));
  f.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    f.rows.push_back(LinForm(iodetail::parse_i64s(L, L.take(), f.dim)));
  iodetail::expect_footer(L, "relations");
  return f;
}

// ---------------------------------------------------------------------------
// Quotient-coordinate files: the expansion of every boundary class over a
// Picard basis, one row per class in index order.

struct QuotientFile {
  int n = 0;
  std::vector<BoundaryClass> basis;
  std::vector<std::pair<BoundaryClass, std::vector<Rat>>> rows;
};

inline QuotientFile make_quotient_file(const QuotientCoords& qc) {
  QuotientFile f;
  f.n = qc.n();
  f.basis = qc.basis;
  f.rows.reserve(qc.full.N());
  for (std::size_t i = 0; i < qc.full.N(); ++i)
    f.rows.emplace_back(qc.full.at(i), qc.expansion[i]);
  return f;
}

inline std::string render_quotient_text(const QuotientFile& f) {
  std::string out = "fultoncones quotient 1\n";
  out += "n " + std::to_string(f.n) + "\n";
  out += "classes " + std::to_string(f.rows.size()) + "\n";
  out += "basis " + std::to_string(f.basis.size()) + "\n";
  out += "labels";
  for (const auto& c : f.basis) out += " " + c.label();
  out += "\n";
  for (const auto& [c, coords] : f.rows)
    out += c.label() + " " + iodetail::render_rats(coords) + "\n";
  out += "end quotient\n";
  return out;
}

inline QuotientFile parse_quotient_text(const std::string& text,
                                        const std::string& where = "quotient") {
  iodetail::Lines L = iodetail::split_lines(where, text);
  iodetail::expect_header(L, "quotient");
  QuotientFile f;
  f.n = iodetail::parse_n_field(L);
  std::size_t classes = iodetail::tok_u64(L, iodetail::expect_key(L, "classes"));
  std::size_t nbasis = iodetail::tok_u64(L, iodetail::expect_key(L, "basis"));
  auto labels = iodetail::split_tokens(L, iodetail::expect_key(L, "labels"));
  if (labels.size() != nbasis) iodetail::fail(L.where, L.lineno(), "basis label count mismatch");
  for (const auto& l : labels) {
    try {
      f.basis.push_back(parse_class_label(f.n, l));
    } catch (const std::exception& e) {
      iodetail::fail(L.where, L.lineno(), e.what());
    }
  }
  f.rows.reserve(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    auto toks = iodetail::split_tokens(L, L.take());
    if (toks.size() != nbasis + 1)
      iodetail::fail(L.where, L.lineno(), "expected label plus basis coordinates");
    BoundaryClass c{f.n, 0};
    try {
      c = parse_class_label(f.n, toks[0]);
    } catch (const std::exception& e) {
      iodetail::fail(L.where, L.lineno(), e.what());
    }
    std::vector<Rat> coords(nbasis);
    for (std::size_t k = 0; k < nbasis; ++k) coords[k] = iodetail::tok_rat(L, toks[k + 1]);
    f.rows.emplace_back(c, std::move(coords));
  }
  iodetail::expect_footer(L, "quotient");
  return f;
}

// ---------------------------------------------------------------------------
// Proof bundles: a directory with the report manifest, the inner (F-nef)
// cone, every filtration cone, and the certificate file.

namespace iodetail {

inline std::string step_cone_name(std::size_t step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "step-%03zu.cone", step);
  return std::string(buf);
}

inline std::string mode_space(const std::string& mode) {
  return mode == "ambient-line" ? "ambient" : "quotient";
}

}  // namespace iodetail

inline void write_bundle(const std::filesystem::path& dir, const ProofBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string());
  const FiltrationReport& rep = bundle.run.report;
  const std::string space = iodetail::mode_space(rep.mode);

  iodetail::write_text_file(dir / "report.txt", render_report_text(rep));
  iodetail::write_text_file(dir / "inner.cone",
                            render_cone_text({rep.n, space, bundle.run.inner}));
  for (std::size_t i = 0; i < bundle.run.cones.size(); ++i)
    iodetail::write_text_file(dir / iodetail::step_cone_name(i),
                              render_cone_text({rep.n, space, bundle.run.cones[i]}));
  CertificatesFile cf;
  cf.n = rep.n;
  cf.dim = bundle.run.inner.dim();
  cf.certificates = bundle.certificates;
  iodetail::write_text_file(dir / "certificates.txt", render_certificates_text(cf));
}

struct AuditResult {
  std::size_t total = 0;
  std::size_t verified = 0;
  std::vector<std::string> failures;  // each names the offending file
  bool ok() const { return total > 0 && verified == total && failures.empty(); }
};

// Re-verifies a bundle with pure arithmetic: parses the manifest, the inner
// cone, the step cones, and the certificates, cross-checks all counts, and
// re-checks every Farkas identity. No linear programming is involved.
inline AuditResult audit_bundle(const std::filesystem::path& dir) {
  auto parse_file = [&](const std::string& name) {
    return iodetail::read_text_file(dir / name);
  };

  FiltrationReport rep = parse_report_text(parse_file("report.txt"), (dir / "report.txt").string());
  if (!std::filesystem::exists(dir / "certificates.txt"))
    throw io_error(dir.string() + ": no certificates");
  CertificatesFile certs =
      parse_certificates_text(parse_file("certificates.txt"), (dir / "certificates.txt").string());
  if (certs.certificates.empty()) throw io_error(dir.string() + ": no certificates");
  ConeFile inner = parse_cone_text(parse_file("inner.cone"), (dir / "inner.cone").string());

  AuditResult out;
  out.total = certs.certificates.size();
  const std::string cert_file = (dir / "certificates.txt").string();

  if (inner.cone.dim() != certs.dim)
    out.failures.push_back(cert_file + ": dim does not match inner cone");
  if (rep.steps.empty()) {
    out.failures.push_back((dir / "report.txt").string() + ": empty report");
    return out;
  }

  ConeFile final_cone;
  for (std::size_t i = 0; i < rep.steps.size(); ++i) {
    const std::string name = iodetail::step_cone_name(i);
    ConeFile cf = parse_cone_text(parse_file(name), (dir / name).string());
    if (cf.cone.size() != rep.steps[i].facet_count)
      out.failures.push_back((dir / name).string() + ": facet count does not match report");
    if (i + 1 == rep.steps.size()) final_cone = std::move(cf);
  }
  if (!rep.contained)
    out.failures.push_back((dir / "report.txt").string() + ": report does not claim containment");
  if (rep.steps.back().gamma != 0)
    out.failures.push_back((dir / "report.txt").string() + ": final gamma is nonzero");
  if (final_cone.cone.size() != certs.certificates.size())
    out.failures.push_back(cert_file + ": certificate count does not match final cone");

  for (std::size_t i = 0; i < certs.certificates.size(); ++i) {
    const FarkasCertificate& c = certs.certificates[i];
    bool good = true;
    if (i < final_cone.cone.size() && !(c.target == final_cone.cone.forms[i])) {
      out.failures.push_back(cert_file + ": certificate " + std::to_string(i) +
                             " target is not the matching facet");
      good = false;
    }
    if (!verify_certificate(inner.cone, c)) {
      out.failures.push_back(cert_file + ": certificate " + std::to_string(i) +
                             " fails the Farkas identity");
      good = false;
    }
    if (good) ++out.verified;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step cache: each filtration step is stored under a key derived from the
// format version, n, mode, basis, and the exact generator prefix, so stale
// entries (other formats, other prefixes) can never be confused for hits.

namespace iodetail {

struct CacheKey {
  std::string material;  // human-readable key material
  std::string hex;       // fnv128 of the material
};

inline CacheKey cache_key(int n, const std::string& mode,
                          const std::vector<std::string>& basis_labels, std::size_t step,
                          const std::vector<std::vector<std::int64_t>>& prefix) {
  std::string m = "fultoncones stepcache 1|n " + std::to_string(n) + "|mode " + mode + "|basis";
  for (const auto& l : basis_labels) m += " " + l;
  m += "|step " + std::to_string(step) + "|prefix";
  for (const auto& g : prefix) m += "|" + render_i64s(g);
  return CacheKey{m, fnv128_hex(m)};
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, int n,
                                        const std::string& mode, std::size_t step,
                                        const CacheKey& key) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step%03zu", step);
  return dir / ("n" + std::to_string(n) + "-" + mode_space(mode) + "-" + buf + "-" +
                key.hex + ".txt");
}

struct StepCacheEntry {
  StepRecord record;
  ConeH cone;
};

inline std::string render_step_cache_text(const CacheKey& key, const StepCacheEntry& e) {
  std::string out = "fultoncones stepcache 1\n";
  out += "key " + key.hex + "\n";
  render_step_block(out, e.record);
  render_cone_block(out, e.cone);
  out += "end stepcache\n";
  return out;
}

// false when the file is absent, stale (key mismatch), or unparseable:
// stale caches are ignored, never trusted.
inline bool load_step_cache(const std::filesystem::path& path, const CacheKey& key,
                            StepCacheEntry& out) {
  if (!std::filesystem::exists(path)) return false;
  try {
    Lines L = split_lines(path.string(), read_text_file(path));
    expect_header(L, "stepcache");
    if (expect_key(L, "key") != key.hex) return false;
    out.record = parse_step_block(L);
    out.cone = parse_cone_block(L);
    expect_footer(L, "stepcache");
    return true;
  } catch (const io_error&) {
    return false;
  }
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Cache-aware filtration. Mirrors the engine's runners step by step, but
// satisfies each step from the cache when the exact generator prefix is
// already stored. A fully warm run performs no cone arithmetic and no linear
// programming at all. When a cold step extends a warm prefix, the containment
// scan of the last cached cone is replayed first (and checked against the
// cached record) so the verdict cache is as warm as an uncached run's.

struct FiltrateRequest {
  int n = 0;
  bool ambient = true;
  std::vector<BoundaryClass> basis;  // quotient mode; empty = basis_Bn(n)
  std::vector<BoundaryClass> order;  // quotient mode; empty = default order
  bool greedy = false;               // quotient mode
  std::size_t max_steps = static_cast<std::size_t>(-1);
  int workers = 1;
  bool allow_deep_ambient7 = false;
  std::filesystem::path cache_dir;  // empty = caching disabled
};

struct FiltrateRun {
  FiltrationReport report;
  std::vector<ConeH> cones;
  std::size_t cache_hits = 0;
  std::size_t steps_computed = 0;
};

inline FiltrateRun filtrate_cached(const FiltrateRequest& req) {
  if (req.n < 4 || req.n > 7) throw std::invalid_argument("filtrations support n = 4..7");
  if (req.workers < 1) throw std::invalid_argument("workers must be at least 1");
  const bool use_cache = !req.cache_dir.empty();
  if (use_cache) {
    std::error_code ec;
    std::filesystem::create_directories(req.cache_dir, ec);
    if (ec) throw io_error("cannot create cache directory " + req.cache_dir.string());
  }

  AmbientIndex ix = enumerate_classes(req.n);
  const std::string mode = req.ambient ? "ambient-line" : "quotient-ray";

  // Inner cone, start cone, and the generator plan.
  ConeH inner, start;
  std::vector<LinForm> rels;
  QuotientCoords qc;
  std::vector<BoundaryClass> order = req.order;
  std::vector<std::string> basis_labels;
  std::size_t planned = 0;
  if (req.ambient) {
    if (req.greedy) throw std::invalid_argument("greedy selection requires quotient mode");
    if (!req.order.empty()) throw std::invalid_argument("ambient order is fixed");
    if (!req.basis.empty()) throw std::invalid_argument("ambient mode takes no basis");
    rels = relation_basis(ix);
    planned = std::min({rels.size(), req.max_steps, 2 * rels.size()});
    if (req.n == 7 && planned > 7) {
      if (req.max_steps != static_cast<std::size_t>(-1) && !req.allow_deep_ambient7)
        throw std::invalid_argument(
            "ambient n=7 steps beyond 7 are refused without an explicit override");
      if (!req.allow_deep_ambient7) planned = 7;
    }
    inner = fnef_cone(ix);
    start = positive_orthant(class_labels(ix));
  } else {
    std::vector<BoundaryClass> basis = req.basis.empty() ? basis_Bn(req.n) : req.basis;
    qc = quotient_coordinates(ix, basis);
    if (order.empty() && !req.greedy) order = default_quotient_order(qc);
    for (const auto& c : order) {
      if (c.n != req.n) throw std::invalid_argument("order class has wrong n");
      if (qc.in_basis(c)) throw std::invalid_argument("order class lies in the basis");
    }
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j)
        if (order[i] == order[j]) throw std::invalid_argument("duplicate class in order");
    const std::size_t budget = dim_Vn(req.n);
    planned = std::min(req.greedy ? budget : order.size(), std::min(req.max_steps, budget));
    inner = restricted_fnef_cone(qc);
    start = positive_orthant(class_labels(qc.basis));
    basis_labels = class_labels(qc.basis);
  }

  FiltrateRun run;
  run.report.n = req.n;
  run.report.mode = mode;
  GeneratorSet gens;
  gens.dim = start.dim();
  gens.lines = req.ambient;
  GammaState state;
  std::vector<std::vector<std::int64_t>> prefix;
  bool last_from_cache = false;

  auto try_cache = [&](std::size_t step) -> bool {
    if (!use_cache) return false;
    iodetail::CacheKey key = iodetail::cache_key(req.n, mode, basis_labels, step, prefix);
    iodetail::StepCacheEntry e;
    if (!iodetail::load_step_cache(iodetail::cache_path(req.cache_dir, req.n, mode, step, key),
                                   key, e))
      return false;
    if (e.record.step != step || e.cone.dim() != start.dim()) return false;
    if (step > 0 && e.record.generator != prefix.back()) return false;
    run.report.steps.push_back(std::move(e.record));
    run.cones.push_back(std::move(e.cone));
    ++run.cache_hits;
    return true;
  };

  auto store_cache = [&](std::size_t step) {
    if (!use_cache) return;
    iodetail::CacheKey key = iodetail::cache_key(req.n, mode, basis_labels, step, prefix);
    iodetail::StepCacheEntry e{run.report.steps.back(), run.cones.back()};
    iodetail::write_text_file(iodetail::cache_path(req.cache_dir, req.n, mode, step, key),
                              iodetail::render_step_cache_text(key, e));
  };

  // Replays the containment scan of the last cached cone so composed
  // certificates are available for the cold steps that follow; the replayed
  // verdict must agree with the cached record.
  auto warm_state = [&]() {
    if (!last_from_cache) return;
    GammaResult g = containment_index(inner, run.cones.back(), {req.workers, &state});
    if (g.gamma != run.report.steps.back().gamma || g.violated != run.report.steps.back().violated)
      throw io_error("cache verification failed in " + req.cache_dir.string() +
                     "; delete the cache directory");
    last_from_cache = false;
  };

  // Step 0.
  if (try_cache(0)) {
    last_from_cache = true;
  } else {
    StepRecord r0;
    r0.raw_count = start.size();
    r0.facet_count = start.size();
    GammaResult g = containment_index(inner, start, {req.workers, &state});
    r0.gamma = g.gamma;
    r0.violated = std::move(g.violated);
    run.report.steps.push_back(std::move(r0));
    run.cones.push_back(start);
    ++run.steps_computed;
    store_cache(0);
  }

  std::vector<BoundaryClass> remaining;
  if (req.greedy)
    for (const auto& c : qc.full.classes)
      if (!qc.in_basis(c)) remaining.push_back(c);

  for (std::size_t s = 1; s <= planned; ++s) {
    if (!req.ambient && run.report.steps.back().gamma == 0 && req.greedy) break;

    std::vector<std::int64_t> g;
    std::string label;
    if (req.ambient) {
      g = rels[s - 1].c;
      label = "v" + std::to_string(s);
    } else if (req.greedy) {
      GreedyPick pick =
          greedy_select(run.cones.back(), run.report.steps.back().violated, remaining, qc);
      for (std::size_t i = 0; i < remaining.size(); ++i)
        if (remaining[i] == pick.cls) {
          remaining.erase(remaining.begin() + i);
          break;
        }
      g = qc.primitive_direction(pick.cls);
      label = pick.cls.label();
    } else {
      g = qc.primitive_direction(order[s - 1]);
      label = order[s - 1].label();
    }
    prefix.push_back(g);

    if (try_cache(s)) {
      gens.added.push_back(std::move(g));
      last_from_cache = true;
      continue;
    }

    warm_state();
    const ConeH& prev = run.cones.back();
    const StepRecord& prevRec = run.report.steps.back();
    StepRecord rec;
    rec.step = s;
    rec.generator_label = label;
    rec.generator = g;
    rec.prev_gamma = prevRec.gamma;
    for (auto j : prevRec.violated) {
      std::int64_t e = prev.forms[j].eval(g);
      if (req.ambient ? e != 0 : e < 0) ++rec.enlarged;
    }
    SumStepResult sr = sum_step_rank(prev, gens, g, req.ambient);
    for (const auto& cand : sr.kept) detail::compose_certificate(state, cand, prev);
    rec.raw_count = sr.raw_count;
    rec.raw_count_pruned = sr.raw_count_pruned;
    rec.facet_count = sr.cone.size();
    run.cones.push_back(std::move(sr.cone));
    GammaResult gr = containment_index(inner, run.cones.back(), {req.workers, &state});
    rec.gamma = gr.gamma;
    rec.violated = std::move(gr.violated);
    run.report.steps.push_back(std::move(rec));
    ++run.steps_computed;
    store_cache(s);
  }

  run.report.contained = run.report.steps.back().gamma == 0;
  run.report.budget_exhausted = !run.report.contained;
  return run;
}

}  // namespace fulton
