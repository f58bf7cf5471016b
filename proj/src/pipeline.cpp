#include "hkreduce/pipeline.hpp"

#include "hkreduce/errors.hpp"
#include "hkreduce/prequant.hpp"
#include "hkreduce/reduction.hpp"
#include "hkreduce/spec_format.hpp"
#include "hkreduce/twistor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace hkreduce {

const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Flat: return "flat";
    case ProblemKind::Quiver: return "quiver";
    case ProblemKind::Nahm: return "nahm";
  }
  return "?";
}

const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> groups{"hk",         "pairing",   "theorem", "forms",
                                               "lie",        "invariance", "curvature", "twistor",
                                               "nahm",       "prequant"};
  return groups;
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"kind", "name"}},
      {"flat", {"hermitian_dim"}},
      {"quiver", {"vertices", "edges", "v", "w", "zeta_R", "zeta_C", "init_scale", "solver_tol"}},
      {"nahm",
       {"m", "tau1", "tau2", "tau3", "tau1_diag", "tau2_diag", "tau3_diag", "L", "N", "solution", "amplitude", "n_Y",
        "tail_tol", "solver_tol"}},
      {"verify", {"h", "n_zeta", "n_random", "seed", "tol", "checks"}},
      {"prequant",
       {"zeta_C", "tau", "tau_diag", "lambdas", "rank", "tol", "expect_quiver_J", "expect_quiver_K", "expect_nahm_J",
        "expect_nahm_K", "expect_higgs_J", "expect_higgs_K"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string field_name(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

class Reader {
 public:
  explicit Reader(const SpecDocument& doc) : doc_(doc) {}

  const SpecValue* opt(const std::string& sec, const std::string& key) const { return doc_.find(sec, key); }
  const SpecValue& req(const std::string& sec, const std::string& key) const { return doc_.get(sec, key); }

  long long integer(const std::string& sec, const std::string& key, long long lo) const {
    const SpecValue& v = req(sec, key);
    const long long x = v.as_int(field_name(sec, key));
    if (x < lo) fail(v, sec, key, "must be at least " + std::to_string(lo));
    return x;
  }
  long long integer(const std::string& sec, const std::string& key, long long lo, long long dflt) const {
    return opt(sec, key) ? integer(sec, key, lo) : dflt;
  }

  double positive(const std::string& sec, const std::string& key) const {
    const SpecValue& v = req(sec, key);
    const double x = v.as_real(field_name(sec, key));
    if (!(x > 0.0)) fail(v, sec, key, "must be positive");
    return x;
  }
  double positive(const std::string& sec, const std::string& key, double dflt) const {
    return opt(sec, key) ? positive(sec, key) : dflt;
  }

  std::vector<double> reals(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    for (const auto& e : req(sec, key).as_list(field_name(sec, key))) out.push_back(e.as_real(field_name(sec, key)));
    return out;
  }
  std::vector<int> ints(const std::string& sec, const std::string& key) const {
    std::vector<int> out;
    for (const auto& e : req(sec, key).as_list(field_name(sec, key))) {
      const long long x = e.as_int(field_name(sec, key));
      if (x < 0 || x > 1000000) fail(e, sec, key, "entries must be non-negative");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }
  std::vector<cplx> complexes(const SpecValue& v, const std::string& field) const {
    std::vector<cplx> out;
    for (const auto& e : v.as_list(field)) out.push_back(e.as_complex(field));
    return out;
  }

  CMat matrix(const SpecValue& v, const std::string& field) const {
    const auto& rows = v.as_list(field);
    if (rows.empty()) throw SchemaError(field, v.line, "empty matrix");
    const auto n = rows.front().as_list(field).size();
    CMat out(rows.size(), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r].as_list(field);
      if (row.size() != n) throw SchemaError(field, rows[r].line, "ragged matrix rows");
      for (std::size_t c = 0; c < n; ++c) out(r, c) = row[c].as_complex(field);
    }
    return out;
  }

  // Either a full matrix under `key` or i diag(s) under `key_diag`.
  std::optional<CMat> tau(const std::string& sec, const std::string& key) const {
    const SpecValue* full = opt(sec, key);
    const SpecValue* diag = opt(sec, key + "_diag");
    if (full && diag) fail(*diag, sec, key + "_diag", "give either " + key + " or " + key + "_diag");
    if (full) return matrix(*full, field_name(sec, key));
    if (diag) {
      const std::vector<double> s = reals(sec, key + "_diag");
      CMat out = CMat::Zero(s.size(), s.size());
      for (std::size_t k = 0; k < s.size(); ++k) out(k, k) = cplx(0.0, s[k]);
      return out;
    }
    return std::nullopt;
  }

  [[noreturn]] static void fail(const SpecValue& v, const std::string& sec, const std::string& key,
                                const std::string& what) {
    throw SchemaError(field_name(sec, key), v.line, what);
  }

  const SpecDocument& doc() const { return doc_; }

 private:
  const SpecDocument& doc_;
};

void check_schema(const SpecDocument& doc) {
  for (const auto& sec : doc.sections()) {
    const auto it = schema().find(sec.name);
    if (it == schema().end()) throw SchemaError(sec.name, sec.line, "unknown section");
    for (const auto& e : sec.entries) {
      if (!it->second.count(e.key)) throw SchemaError(field_name(sec.name, e.key), e.value.line, "unknown field");
    }
  }
}

int section_line(const SpecDocument& doc, const std::string& name) {
  const SpecSection* s = doc.section(name);
  return s ? s->line : 0;
}

void parse_quiver(const Reader& rd, QuiverSpec& q) {
  const std::string S = "quiver";
  q.quiver.n = static_cast<int>(rd.integer(S, "vertices", 1));
  if (const SpecValue* edges = rd.opt(S, "edges")) {
    for (const auto& e : edges->as_list("quiver.edges")) {
      const auto& pair = e.as_list("quiver.edges");
      if (pair.size() != 2) throw SchemaError("quiver.edges", e.line, "each edge is [source, target]");
      q.quiver.edges.push_back(
          {static_cast<int>(pair[0].as_int("quiver.edges")), static_cast<int>(pair[1].as_int("quiver.edges"))});
    }
  }
  q.dims.v = rd.ints(S, "v");
  q.dims.w = rd.ints(S, "w");
  q.params.zeta_R = rd.reals(S, "zeta_R");
  q.params.zeta_C = rd.complexes(rd.req(S, "zeta_C"), "quiver.zeta_C");
  q.init_scale = rd.positive(S, "init_scale", 1.0);
  q.solver_tol = rd.positive(S, "solver_tol", 1e-10);
  try {
    QuiverProblem check(q.quiver, q.dims, q.params);
  } catch (const Error& e) {
    throw SchemaError("quiver", section_line(rd.doc(), S), e.what());
  }
}

void parse_nahm(const Reader& rd, NahmSpec& n) {
  const std::string S = "nahm";
  n.config.m = static_cast<int>(rd.integer(S, "m", 2));
  const char* keys[3] = {"tau1", "tau2", "tau3"};
  for (int a = 0; a < 3; ++a) {
    auto t = rd.tau(S, keys[a]);
    if (!t) rd.req(S, keys[a]);  // throws, naming the field
    n.config.tau[a] = *t;
  }
  n.config.L = rd.positive(S, "L", 15.0);
  n.config.N = static_cast<int>(rd.integer(S, "N", 5, 600));
  if (const SpecValue* v = rd.opt(S, "solution")) {
    n.solution = v->as_string("nahm.solution");
    if (n.solution != "constant" && n.solution != "closed_form" && n.solution != "decaying") {
      throw SchemaError("nahm.solution", v->line, "expected constant, closed_form or decaying");
    }
  }
  n.amplitude = rd.positive(S, "amplitude", 0.3);
  n.n_Y = static_cast<int>(rd.integer(S, "n_Y", 1, 5));
  n.tail_tol = rd.positive(S, "tail_tol", 1e-6);
  n.solver_tol = rd.positive(S, "solver_tol", 1e-8);
  try {
    n.config.validate();
  } catch (const Error& e) {
    throw SchemaError("nahm", section_line(rd.doc(), S), e.what());
  }
  if (n.solution == "closed_form") {
    double t = 0.0;
    for (const auto& m : n.config.tau) t = std::max(t, m.norm());
    if (n.config.m != 2 || t != 0.0) {
      throw SchemaError("nahm.solution", section_line(rd.doc(), S), "closed_form needs m = 2 and tau = 0");
    }
  }
}

void parse_verify(const Reader& rd, VerifySettings& v) {
  const std::string S = "verify";
  v.h = rd.positive(S, "h", 1e-4);
  v.n_zeta = static_cast<int>(rd.integer(S, "n_zeta", 1, 20));
  v.n_random = static_cast<int>(rd.integer(S, "n_random", 1, 10));
  if (rd.opt(S, "seed")) v.seed = static_cast<std::uint64_t>(rd.integer(S, "seed", 0));
  if (rd.opt(S, "tol")) v.tol = rd.positive(S, "tol");
  if (const SpecValue* c = rd.opt(S, "checks")) {
    for (const auto& e : c->as_list("verify.checks")) {
      const std::string& g = e.as_string("verify.checks");
      const auto& all = check_groups();
      if (std::find(all.begin(), all.end(), g) == all.end()) {
        throw SchemaError("verify.checks", e.line, "unknown check group '" + g + "'");
      }
      v.checks.push_back(g);
    }
  }
}

void parse_prequant(const Reader& rd, PrequantSpec& p) {
  const std::string S = "prequant";
  if (const SpecValue* z = rd.opt(S, "zeta_C")) p.zeta_C = rd.complexes(*z, "prequant.zeta_C");
  if (auto t = rd.tau(S, "tau")) {
    // J pairs with tau_2 and K with tau_3; a single tau serves both.
    p.tau = std::array<CMat, 3>{*t, *t, *t};
  }
  if (const SpecValue* l = rd.opt(S, "lambdas")) {
    std::vector<std::vector<cplx>> out;
    for (const auto& row : l->as_list("prequant.lambdas")) out.push_back(rd.complexes(row, "prequant.lambdas"));
    p.lambdas = std::move(out);
  }
  p.rank = static_cast<int>(rd.integer(S, "rank", 1, 2));
  p.tol = rd.positive(S, "tol", 1e-9);
  for (const char* name : {"quiver_J", "quiver_K", "nahm_J", "nahm_K", "higgs_J", "higgs_K"}) {
    const std::string key = std::string("expect_") + name;
    if (const SpecValue* v = rd.opt(S, key)) p.expect.emplace_back(name, v->as_bool("prequant." + key));
  }
}

}  // namespace

ProblemSpec spec_from_text(const std::string& text) {
  const SpecDocument doc = parse_spec_text(text);
  check_schema(doc);
  const Reader rd(doc);
  ProblemSpec spec;
  spec.hash = fnv1a_hex(text);
  const SpecValue& kind = rd.req("", "kind");
  const std::string& k = kind.as_string("kind");
  if (k == "flat") spec.kind = ProblemKind::Flat;
  else if (k == "quiver") spec.kind = ProblemKind::Quiver;
  else if (k == "nahm") spec.kind = ProblemKind::Nahm;
  else throw SchemaError("kind", kind.line, "expected flat, quiver or nahm");
  if (const SpecValue* n = rd.opt("", "name")) spec.name = n->as_string("name");

  for (const char* other : {"flat", "quiver", "nahm"}) {
    if (other != k && doc.section(other) != nullptr) {
      throw SchemaError(other, section_line(doc, other), "section does not apply to kind " + k);
    }
  }
  if (doc.section(k) == nullptr) throw SchemaError(k, 0, "missing section");
  switch (spec.kind) {
    case ProblemKind::Flat:
      spec.flat.hermitian_dim = static_cast<int>(rd.integer("flat", "hermitian_dim", 1));
      if (spec.flat.hermitian_dim > 64) throw SchemaError("flat.hermitian_dim", 0, "at most 64");
      break;
    case ProblemKind::Quiver: parse_quiver(rd, spec.quiver); break;
    case ProblemKind::Nahm: parse_nahm(rd, spec.nahm); break;
  }
  parse_verify(rd, spec.verify);
  if (doc.section("prequant") != nullptr) {
    parse_prequant(rd, spec.prequant);
    spec.prequant.present = true;
  }
  if (const SpecValue* d = rd.opt("output", "dir")) spec.out_dir = d->as_string("output.dir");
  return spec;
}

ProblemSpec parse_spec(const std::string& path) { return spec_from_text(read_text_file(path)); }

std::uint64_t resolve_seed(const ProblemSpec& spec, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (spec.verify.seed) return *spec.verify.seed;
  if (const char* env = std::getenv("HKREDUCE_SEED")) {
    const std::string s = env;
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
      }
    }
    throw SchemaError("verify.seed", 0, "HKREDUCE_SEED is not a non-negative integer");
  }
  throw SchemaError("verify.seed", 0, "no seed in the spec, on the command line or in HKREDUCE_SEED");
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string short_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  double violation = 0.0;
  std::string note;
  std::optional<bool> pass;  // defaults to violation <= tol
};

class Runner {
 public:
  Runner(VerificationReport& report, const ProblemSpec& spec, const RunOptions& opts)
      : report_(report), opts_(opts) {
    for (const auto& g : spec.verify.checks) groups_.insert(g);
  }

  bool wants(const std::string& group) const { return groups_.empty() || groups_.count(group) > 0; }

  /// Runs fn unless `blocked` names a failed dependency. Returns whether the check passed.
  bool run(const std::string& id, const std::string& anchor, double tol, const std::function<Outcome()>& fn,
           const std::string& blocked = "") {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = anchor;
    rec.tol = tol;
    const auto t0 = std::chrono::steady_clock::now();
    if (!blocked.empty()) {
      rec.violation = kInf;
      rec.pass = false;
      rec.note = "not run: " + blocked;
    } else {
      try {
        Outcome o = fn();
        rec.violation = o.violation;
        rec.note = o.note;
        rec.pass = o.pass ? *o.pass : (std::isfinite(o.violation) && o.violation <= tol);
      } catch (const std::exception& e) {
        rec.violation = kInf;
        rec.pass = false;
        rec.note = std::string("error: ") + e.what();
      }
    }
    rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts_.log) {
      *opts_.log << (rec.pass ? "PASS " : "FAIL ") << rec.id << "  violation " << short_real(rec.violation)
                 << "  tol " << short_real(rec.tol);
      if (!rec.note.empty()) *opts_.log << "  (" << rec.note << ")";
      *opts_.log << "\n";
    }
    const bool pass = rec.pass;
    report_.add(std::move(rec));
    return pass;
  }

 private:
  VerificationReport& report_;
  const RunOptions& opts_;
  std::set<std::string> groups_;
};

double type_tolerance(const ProblemSpec& spec, const RunOptions& opts) {
  if (opts.tol) return *opts.tol;
  if (spec.verify.tol) return *spec.verify.tol;
  return std::max(1e-5, 50.0 * spec.verify.h * spec.verify.h);
}

// max ||F - A^T F A|| over the quotient I, J, K and n seeded I_zeta, divided
// by max(||F||, ||omega^_I||).
double quotient_type_violation(const ReducedChart& chart, const Mat& F, int n, std::uint64_t seed) {
  const Mat I = chart.quotient_structure(Structure::I);
  const Mat J = chart.quotient_structure(Structure::J);
  const Mat K = chart.quotient_structure(Structure::K);
  const Mat wI = descend_kahler(chart, Structure::I)(Vec::Zero(chart.dim()));
  const double scale = std::max(F.norm(), wI.norm());
  double worst = 0.0;
  auto check = [&](const Mat& A) { worst = std::max(worst, (F - A.transpose() * F * A).norm() / scale); };
  check(I);
  check(J);
  check(K);
  for (const auto& d : random_directions(n, seed)) check(d.a() * I + d.b() * J + d.c() * K);
  return worst;
}

namespace anchor {
const char* hk = "I^2 = J^2 = K^2 = IJK = -1 with metric-orthogonal I, J, K";
const char* flat_ids = "d alpha = 0, d(J alpha) = omega_J, d(K alpha) = omega_K for the fibre rotation";
const char* flat_thm = "omega_I - d(I alpha) is of type (1,1) in each complex structure (exact derivative)";
const char* solve = "mu_I = mu_J = mu_K = 0 at the solved point, stabiliser trivial";
const char* pairing = "(J alpha + i K alpha)(Y*) = -2 sum_k (zeta_C)_k tr(Y_k) on the level set";
const char* pairing_unit = "(J alpha + i K alpha)(Y*) = -sum_k (zeta_C)_k tr(Y_k) from the moment map normalisation";
const char* alpha_basic = "alpha(Y*) = 0 on the level set";
const char* chart = "quotient complex structures preserve the horizontal space";
const char* theorem = "omega_I - d(I alpha) is of type (1,1) in each complex structure";
const char* cross = "F_1 = d(J alpha) - omega_J and F_2 = d(K alpha) - omega_K equal (J alpha, K alpha) o Omega";
const char* f_type = "F_1 and F_2 are of type (1,1) in each complex structure";
const char* degen = "zeta_C = 0: F_1 = F_2 = 0, so d(J alpha) = omega_J and d(K alpha) = omega_K descend";
const char* lie = "L_X omega_I = 0, L_X omega_J = -omega_K - F_2, L_X omega_K = omega_J + F_1";
const char* inv = "the eight invariance conditions on alpha and X hold together";
const char* inv_neg = "the eight invariance conditions fail together for a non-invariant alpha";
const char* rep = "J alpha and K alpha vanish on commutators [Y_1, Y_2]*";
const char* curv = "2(omega_I - d(I alpha)) is closed and of type (1,1): hyperholomorphic curvature, class 2i(...)";
const char* tw_flat = "omega(zeta) is of type (2,0) for I_zeta on the flat model";
const char* tw_chart = "omega(zeta) is of type (2,0) for I_zeta on the quotient";
const char* tw_sym = "omega(zeta) and F/zeta - zeta conj(F) are real under zeta -> -1/conj(zeta)";
const char* tw_lie = "L_Y omega(zeta) = F/zeta - zeta conj(F) with Y = X + i zeta d/dzeta";
const char* n_solve = "Nahm's equations T_a' + [T_0, T_a] = [T_b, T_c], discrete residual of the solver";
const char* n_closed = "T_a = -s_a / (2(s + 1)) solves Nahm's equations with limit 0";
const char* n_stencil = "Nahm residual under the fourth-order grid derivative";
const char* n_conv = "halving ds shrinks the interior residual by at least 8";
const char* n_pair = "J alpha(Y*) = -<tau_2, Y(L)>, K alpha(Y*) = -<tau_3, Y(L)>, alpha(Y*) = 0";
const char* n_gauge = "residual norm and boundary pairing are invariant under gauge transformations";
const char* pq_quiver = "zeta_C: Im in (1/2)Z for J, Re in (1/2)Z for K";
const char* pq_nahm = "tau = i diag(s) is a weight: s_k - s_{k+1} in Z";
const char* pq_higgs = "residues: Im lambda (J) or Re lambda (K) in (r/2)Z, trace zero";
}  // namespace anchor

void prequant_checks(Runner& run, const ProblemSpec& spec) {
  const PrequantSpec& p = spec.prequant;
  auto expected = [&](const std::string& name) -> std::optional<bool> {
    for (const auto& [k, v] : p.expect)
      if (k == name) return v;
    return std::nullopt;
  };
  auto record = [&](const std::string& name, const char* anchor, const std::function<bool()>& fn) {
    run.run("prequant." + name, anchor, 0.0, [&] {
      const bool got = fn();
      const auto want = expected(name);
      Outcome o;
      o.note = std::string("prequantizable = ") + (got ? "true" : "false");
      if (want) o.note += std::string(", expected ") + (*want ? "true" : "false");
      const bool pass = want ? got == *want : got;
      o.violation = pass ? 0.0 : 1.0;
      return o;
    });
  };
  std::optional<std::vector<cplx>> zeta = p.zeta_C;
  if (!zeta && spec.kind == ProblemKind::Quiver) zeta = spec.quiver.params.zeta_C;
  if (zeta) {
    record("quiver_J", anchor::pq_quiver, [&] { return quiver_prequant(*zeta, Which::J, p.tol); });
    record("quiver_K", anchor::pq_quiver, [&] { return quiver_prequant(*zeta, Which::K, p.tol); });
  }
  std::optional<std::array<CMat, 3>> tau = p.tau;
  if (!tau && spec.kind == ProblemKind::Nahm) tau = spec.nahm.config.tau;
  if (tau) {
    record("nahm_J", anchor::pq_nahm, [&] { return nahm_prequant((*tau)[1], p.tol); });
    record("nahm_K", anchor::pq_nahm, [&] { return nahm_prequant((*tau)[2], p.tol); });
  }
  if (p.lambdas) {
    record("higgs_J", anchor::pq_higgs, [&] { return higgs_prequant(*p.lambdas, p.rank, Which::J, p.tol); });
    record("higgs_K", anchor::pq_higgs, [&] { return higgs_prequant(*p.lambdas, p.rank, Which::K, p.tol); });
  }
}

// Checks on a chart of the quotient: theorem, forms, Lie derivatives,
// curvature and the twistor identities.
void chart_checks(Runner& run, const ProblemSpec& spec, const RunOptions& opts, const ReducedChart* chart,
                  const std::string& blocked, bool zeta_C_zero) {
  const std::uint64_t seed = opts.seed;
  const double tol = type_tolerance(spec, opts);
  const int nz = spec.verify.n_zeta;

  if (run.wants("theorem")) {
    run.run("reduction.theorem", anchor::theorem, tol, [&] {
      const TheoremCheck t = verify_theorem(*chart, nz, sub_seed(seed, 3), tol);
      return Outcome{t.violation, "relative to |omega^_I|", std::nullopt};
    }, blocked);
  }

  // F from both oracles, computed once.
  std::optional<FPair> Fd, Fo;
  std::string f_error;
  const bool need_F = run.wants("forms") || run.wants("lie") || run.wants("twistor");
  if (need_F && blocked.empty()) {
    try {
      Fd = compute_F_via_d(*chart);
      Fo = compute_F_via_omega(*chart);
    } catch (const std::exception& e) {
      f_error = std::string("F computation failed: ") + e.what();
    }
  }
  const std::string f_blocked = !blocked.empty() ? blocked : f_error;
  const Vec u0 = Vec::Zero(chart ? chart->dim() : 0);

  if (run.wants("forms")) {
    run.run("reduction.F_cross_oracle", anchor::cross, 1e-5, [&] {
      const double wJ = descend_kahler(*chart, Structure::J)(u0).norm();
      const double diff = (Fd->F1 - Fo->F1).norm() + (Fd->F2 - Fo->F2).norm();
      const double scale = std::max(Fo->F1.norm() + Fo->F2.norm(), wJ);
      return Outcome{diff / scale, "relative to max(|F_1| + |F_2|, |omega^_J|)", std::nullopt};
    }, f_blocked);
    run.run("reduction.F_type", anchor::f_type, tol, [&] {
      double v = 0.0;
      for (const Mat* F : {&Fd->F1, &Fd->F2, &Fo->F1, &Fo->F2}) {
        v = std::max(v, quotient_type_violation(*chart, *F, nz, sub_seed(seed, 10)));
      }
      return Outcome{v, "both oracles, relative to max(|F|, |omega^_I|)", std::nullopt};
    }, f_blocked);
    if (zeta_C_zero) {
      run.run("reduction.degeneration", anchor::degen, 1e-5, [&] {
        const double wJ = descend_kahler(*chart, Structure::J)(u0).norm();
        const double v = std::max(Fd->F1.norm() + Fd->F2.norm(), Fo->F1.norm() + Fo->F2.norm()) / wJ;
        return Outcome{v, "(|F_1| + |F_2|) / |omega^_J|", std::nullopt};
      }, f_blocked);
    }
  }

  if (run.wants("lie")) {
    run.run("reduction.lie_derivative", anchor::lie, 1e-4, [&] {
      return Outcome{lie_derivative_check(*chart, *Fo).max(), "", std::nullopt};
    }, f_blocked);
  }

  if (run.wants("curvature")) {
    run.run("reduction.curvature", anchor::curv, 1e-5, [&] {
      const Curvature c = hyperholomorphic_curvature(*chart, nz, sub_seed(seed, 7));
      return Outcome{std::max(c.closedness, c.type_violation),
                     "closedness " + short_real(c.closedness) + ", type " + short_real(c.type_violation),
                     std::nullopt};
    }, blocked);
  }

  if (run.wants("twistor")) {
    const StereographicMap map;
    run.run("twistor.chart_20_type", anchor::tw_chart, 1e-10, [&] {
      double v = 0.0;
      for (cplx z : random_zetas(nz, sub_seed(seed, 8))) v = std::max(v, check_20_type(*chart, z, map));
      return Outcome{v, "", std::nullopt};
    }, blocked);
    run.run("twistor.symmetry", anchor::tw_sym, 1e-12, [&] {
      const LaurentForm w = twistor_form(*chart);
      const CMat Fc = Fo->F1.cast<cplx>() + cplx(0.0, 1.0) * Fo->F2.cast<cplx>();
      const LaurentForm ft = f_tilde(Fc);
      const double scale = std::max(1.0, w.c0.norm());
      const double v = std::max(laurent_distance(involution(w), w), laurent_distance(involution(ft), ft)) / scale;
      return Outcome{v, "", std::nullopt};
    }, f_blocked);
    run.run("twistor.lie_Y", anchor::tw_lie, 1e-4, [&] {
      return Outcome{lie_Y_check(*chart, *Fo, random_zetas(nz, sub_seed(seed, 8))).max(), "", std::nullopt};
    }, f_blocked);
  }
}

void ambient_checks(Runner& run, const HKSpace& space, int hermitian_dim, const RunOptions& opts) {
  if (run.wants("hk")) {
    run.run("hk.invariants", anchor::hk, 1e-12,
            [&] { return Outcome{space.invariant_violation(), "", std::nullopt}; });
  }
  if (run.wants("twistor")) {
    run.run("twistor.flat_20_type", anchor::tw_flat, 1e-10, [&] {
      const CotangentModel model(hermitian_dim);
      const StereographicMap map;
      double v = 0.0;
      for (cplx z : random_zetas(50, sub_seed(opts.seed, 9))) v = std::max(v, check_20_type(model.space(), z, map));
      return Outcome{v, "50 samples", std::nullopt};
    });
  }
}

void run_flat(Runner& run, const ProblemSpec& spec, const RunOptions& opts) {
  const FlatProblem problem(spec.flat.hermitian_dim);
  const CotangentModel& model = problem.model();
  const HKSpace& space = model.space();
  ambient_checks(run, space, spec.flat.hermitian_dim, opts);

  if (run.wants("theorem")) {
    run.run("flat.identities", anchor::flat_ids, 1e-12, [&] {
      const LinearOneForm a = model.alpha();
      const double v = std::max({a.exterior_derivative().norm(),
                                 (a.rotated(space.J()).exterior_derivative().m - kahler_form(space, Structure::J).m).norm(),
                                 (a.rotated(space.K()).exterior_derivative().m - kahler_form(space, Structure::K).m).norm()});
      return Outcome{v, "exact derivative of affine forms", std::nullopt};
    });
    run.run("flat.theorem", anchor::flat_thm, 1e-10, [&] {
      const LinearOneForm a = model.alpha();
      const TwoForm T{kahler_form(space, Structure::I).m - a.rotated(space.I()).exterior_derivative().m};
      const TypeCheck c = is_one_one_all(T, space, spec.verify.n_zeta, sub_seed(opts.seed, 3), 1e-10);
      return Outcome{c.violation, "", std::nullopt};
    });
  }

  std::mt19937_64 rng(sub_seed(opts.seed, 1));
  std::normal_distribution<double> normal;
  Vec x(problem.dim());
  for (int k = 0; k < x.size(); ++k) x(k) = normal(rng);
  std::optional<ReducedChart> chart;
  std::string blocked;
  run.run("reduction.chart", anchor::chart, 1e-9, [&] {
    ChartOptions co;
    co.h = spec.verify.h;
    chart.emplace(problem, make_level_set_point(problem, x), co);
    return Outcome{chart->structure_drift(), "trivial group, chart dimension " + std::to_string(chart->dim()),
                   std::nullopt};
  });
  if (!chart) blocked = "chart construction failed";
  chart_checks(run, spec, opts, chart ? &*chart : nullptr, blocked, true);
}

void run_quiver(Runner& run, const ProblemSpec& spec, const RunOptions& opts) {
  const QuiverSpec& qs = spec.quiver;
  const QuiverProblem problem(qs.quiver, qs.dims, qs.params);
  ambient_checks(run, problem.space(), problem.model().hermitian_dim(), opts);

  std::optional<Vec> x;
  run.run("quiver.solve", anchor::solve, 1e-9, [&] {
    std::mt19937_64 rng(sub_seed(opts.seed, 1));
    SolveOptions so;
    so.tol = qs.solver_tol;
    const SolveResult r = solve_moment(problem, problem.pack(problem.random_point(rng, qs.init_scale)), so);
    x = r.x;
    return Outcome{r.residual, std::to_string(r.iterations) + " Newton steps", std::nullopt};
  });
  const std::string solve_blocked = x ? "" : "level-set solve failed";

  if (run.wants("pairing")) {
    std::vector<PairingCheck> checks;
    if (x) {
      std::mt19937_64 rng(sub_seed(opts.seed, 2));
      for (int k = 0; k < spec.verify.n_random; ++k) {
        checks.push_back(pairing_identity_check(problem, *x, problem.random_element(rng)));
      }
    }
    run.run("quiver.pairing_identity", anchor::pairing, 1e-9, [&] {
      double v = 0.0;
      for (const auto& c : checks) v = std::max(v, c.residual);
      return Outcome{v, "max over random Y of |lhs + 2 central|", std::nullopt};
    }, solve_blocked);
    run.run("quiver.pairing_coefficient", anchor::pairing_unit, 1e-9, [&] {
      double v = 0.0;
      for (const auto& c : checks) v = std::max(v, std::abs(c.lhs + c.central));
      return Outcome{v, "max over random Y of |lhs + central|", std::nullopt};
    }, solve_blocked);
    run.run("quiver.alpha_basic", anchor::alpha_basic, 1e-11, [&] {
      double v = 0.0;
      for (const auto& c : checks) v = std::max(v, c.alpha_value);
      return Outcome{v, "", std::nullopt};
    }, solve_blocked);
  }

  if (run.wants("invariance")) {
    Vec Y(problem.gauge_dim());
    {
      std::mt19937_64 rng(sub_seed(opts.seed, 4));
      std::normal_distribution<double> normal;
      for (int k = 0; k < Y.size(); ++k) Y(k) = normal(rng);
    }
    run.run("reduction.invariance", anchor::inv, 1e-7, [&] {
      const InvarianceReport r = invariance_diagnostics(problem, problem.alpha(), *x, Y, 4, sub_seed(opts.seed, 5));
      const double v = *std::max_element(r.violation.begin(), r.violation.end());
      return Outcome{v, r.consistent() ? "consistent" : "inconsistent", r.all_pass()};
    }, solve_blocked);
    run.run("reduction.invariance_negative", anchor::inv_neg, 0.0, [&] {
      const LinearOneForm bad = perturbed_alpha(problem, sub_seed(opts.seed, 6));
      const InvarianceReport r = invariance_diagnostics(problem, bad, *x, Y, 4, sub_seed(opts.seed, 5));
      const double holding = static_cast<double>(std::count(r.pass.begin(), r.pass.end(), true));
      const double smallest = *std::min_element(r.violation.begin(), r.violation.end());
      return Outcome{holding, "conditions still holding; smallest violation " + short_real(smallest), std::nullopt};
    }, solve_blocked);
    run.run("reduction.rep_homomorphism", anchor::rep, 1e-9, [&] {
      return Outcome{rep_homomorphism_check(problem, *x, spec.verify.n_random, sub_seed(opts.seed, 6)), "",
                     std::nullopt};
    }, solve_blocked);
  }

  const bool need_chart = run.wants("theorem") || run.wants("forms") || run.wants("lie") || run.wants("curvature") ||
                          run.wants("twistor");
  if (!need_chart) return;
  std::optional<ReducedChart> chart;
  run.run("reduction.chart", anchor::chart, 1e-9, [&] {
    ChartOptions co;
    co.h = spec.verify.h;
    chart.emplace(problem, make_level_set_point(problem, *x), co);
    return Outcome{chart->structure_drift(), "chart dimension " + std::to_string(chart->dim()), std::nullopt};
  }, solve_blocked);
  const std::string blocked = !solve_blocked.empty() ? solve_blocked : (chart ? "" : "chart construction failed");
  bool zero = true;
  for (cplx z : qs.params.zeta_C) zero = zero && z == 0.0;
  chart_checks(run, spec, opts, chart ? &*chart : nullptr, blocked, zero);
}

struct NahmSolved {
  NahmPath path;
  double residual = 0.0;
};

NahmSolved solve_nahm_spec(const NahmSpec& ns, int N) {
  NahmConfig cfg = ns.config;
  cfg.N = N;
  NahmSolveOptions so;
  so.tol = ns.solver_tol;
  NahmSolved out;
  if (ns.solution == "constant") {
    out.path = constant_path(cfg);
    out.residual = nahm_residual(out.path).sup();
  } else if (ns.solution == "closed_form") {
    // perturbed interior, exact terminal value
    const NahmPath exact = closed_form_path(cfg.L, N);
    NahmPath init = exact;
    for (auto& node : init.T)
      for (int a = 1; a < 4; ++a) node[a] *= 1.05;
    init.T.back() = exact.T.back();
    so.anchor_from_init = true;
    out.path = solve_nahm(cfg, init, so);
    out.residual = hermite_residual(out.path);
  } else {
    out.path = decaying_solution(cfg, ns.amplitude, so);
    out.residual = hermite_residual(out.path);
  }
  return out;
}

void run_nahm(Runner& run, const ProblemSpec& spec, const RunOptions& opts) {
  const NahmSpec& ns = spec.nahm;
  std::optional<NahmSolved> sol;
  const double solve_tol = ns.solution == "constant" ? 1e-12 : ns.solver_tol;
  run.run("nahm.solve", anchor::n_solve, solve_tol, [&] {
    sol = solve_nahm_spec(ns, ns.config.N);
    return Outcome{sol->residual, ns.solution + " solution, N = " + std::to_string(ns.config.N), std::nullopt};
  });
  const std::string blocked = sol ? "" : "Nahm solve failed";

  if (!run.wants("nahm")) return;
  if (ns.solution == "closed_form") {
    run.run("nahm.closed_form", anchor::n_closed, 1e-6, [&] {
      const NahmPath exact = closed_form_path(ns.config.L, ns.config.N);
      double err = 0.0;
      for (int i = 0; i < exact.size(); ++i)
        for (int a = 0; a < 4; ++a) err = std::max(err, (sol->path.T[i][a] - exact.T[i][a]).cwiseAbs().maxCoeff());
      return Outcome{err, "sup error against the closed form", std::nullopt};
    }, blocked);
  }
  const double stencil_tol = ns.solution == "constant" ? 1e-12 : 1e-5;
  run.run("nahm.stencil_residual", anchor::n_stencil, stencil_tol, [&] {
    return Outcome{nahm_residual(sol->path).sup_interior(), "", std::nullopt};
  }, blocked);
  if (ns.solution != "constant") {
    run.run("nahm.grid_convergence", anchor::n_conv, 1.0 / 8.0, [&] {
      const NahmSolved fine = solve_nahm_spec(ns, 2 * ns.config.N - 1);
      const double ratio = nahm_residual(sol->path).sup_interior() / nahm_residual(fine.path).sup_interior();
      return Outcome{1.0 / ratio, "violation = 1/ratio, ratio " + short_real(ratio), std::nullopt};
    }, blocked);
  }
  // The closed form decays like 1/s, outside the exponential-decay setting
  // where the truncated pairing integrals make sense.
  if (ns.solution == "closed_form") return;
  run.run("nahm.boundary_pairing", anchor::n_pair, 1e-4, [&] {
    std::mt19937_64 rng(sub_seed(opts.seed, 2));
    double v = 0.0;
    for (int k = 0; k < ns.n_Y; ++k) {
      const CMat H = random_su(ns.config.m, rng);
      const CMat Z = random_su(ns.config.m, rng);
      const GaugePathElement Y = boundary_gauge_element(sol->path, H, Z);
      v = std::max(v, boundary_pairing_check(ns.config, sol->path, Y, ns.tail_tol).max());
    }
    return Outcome{v, std::to_string(ns.n_Y) + " random Y", std::nullopt};
  }, blocked);
  run.run("nahm.gauge_invariance", anchor::n_gauge, 1e-4, [&] {
    const NahmPath& T = sol->path;
    const SuAlgebra g(ns.config.m);
    const Mat cartan = centralizer_basis(g, ns.config.tau);
    std::mt19937_64 rng(sub_seed(opts.seed, 11));
    std::normal_distribution<double> normal;
    Vec hc(cartan.cols());
    for (int k = 0; k < hc.size(); ++k) hc(k) = normal(rng);
    const CMat Hg = g.element(cartan * hc);
    const CMat Zg = random_su(ns.config.m, rng);
    // g(s) = exp(psi(s) Hg + sin^2(pi s / L) Zg): g(0) = e, g(L) in exp(h), g'(L) = 0
    const GaugePathElement G = boundary_gauge_element(T, Hg, Zg);
    GaugePath gp;
    for (const CMat& X : G.Y) gp.push_back(exp_skew(X));
    gp.front() = CMat::Identity(ns.config.m, ns.config.m);
    const NahmPath gT = gauge_act(gp, T);
    double v = std::abs(nahm_residual(gT).sup_interior() - nahm_residual(T).sup_interior());
    for (int k = 0; k < ns.n_Y; ++k) {
      const GaugePathElement Y = boundary_gauge_element(T, random_su(ns.config.m, rng), random_su(ns.config.m, rng));
      GaugePathElement gY;
      for (int i = 0; i < T.size(); ++i) gY.Y.push_back(gp[i] * Y.Y[i] * gp[i].adjoint());
      const BoundaryPairing a = boundary_pairing_check(ns.config, T, Y, ns.tail_tol);
      const BoundaryPairing b = boundary_pairing_check(ns.config, gT, gY, ns.tail_tol);
      v = std::max({v, std::abs(a.j_alpha - b.j_alpha), std::abs(a.k_alpha - b.k_alpha),
                    std::abs(a.alpha_value - b.alpha_value)});
    }
    return Outcome{v, "residual and pairing differences", std::nullopt};
  }, blocked);
}

VerificationReport fresh_report(const ProblemSpec& spec) {
  VerificationReport r;
  r.spec_hash = spec.hash;
  r.environment = environment_stamp();
  return r;
}

}  // namespace

VerificationReport run_verify(const ProblemSpec& spec, const RunOptions& opts) {
  VerificationReport report = fresh_report(spec);
  Runner run(report, spec, opts);
  switch (spec.kind) {
    case ProblemKind::Flat: run_flat(run, spec, opts); break;
    case ProblemKind::Quiver: run_quiver(run, spec, opts); break;
    case ProblemKind::Nahm: run_nahm(run, spec, opts); break;
  }
  if (run.wants("prequant") && spec.prequant.present) prequant_checks(run, spec);
  return report;
}

VerificationReport run_prequant(const ProblemSpec& spec, const RunOptions& opts) {
  VerificationReport report = fresh_report(spec);
  Runner run(report, spec, opts);
  prequant_checks(run, spec);
  return report;
}

SolveOutput run_solve(const ProblemSpec& spec, const RunOptions& opts) {
  SolveOutput out;
  out.report = fresh_report(spec);
  Runner run(out.report, spec, opts);
  std::ostringstream s;
  s.precision(17);
  switch (spec.kind) {
    case ProblemKind::Flat: {
      const FlatProblem problem(spec.flat.hermitian_dim);
      run.run("flat.base", "base point of the flat model", 0.0, [&] {
        std::mt19937_64 rng(sub_seed(opts.seed, 1));
        std::normal_distribution<double> normal;
        s << "# flat base point, real coordinates\n";
        for (int k = 0; k < problem.dim(); ++k) s << normal(rng) << "\n";
        return Outcome{0.0, "", std::nullopt};
      });
      break;
    }
    case ProblemKind::Quiver: {
      const QuiverSpec& qs = spec.quiver;
      const QuiverProblem problem(qs.quiver, qs.dims, qs.params);
      run.run("quiver.solve", anchor::solve, 1e-9, [&] {
        std::mt19937_64 rng(sub_seed(opts.seed, 1));
        SolveOptions so;
        so.tol = qs.solver_tol;
        const SolveResult r = solve_moment(problem, problem.pack(problem.random_point(rng, qs.init_scale)), so);
        s << "# quiver level-set point, real coordinates; residual " << r.residual << "\n";
        for (int k = 0; k < r.x.size(); ++k) s << r.x(k) << "\n";
        return Outcome{r.residual, std::to_string(r.iterations) + " Newton steps", std::nullopt};
      });
      break;
    }
    case ProblemKind::Nahm: {
      const NahmSpec& ns = spec.nahm;
      run.run("nahm.solve", anchor::n_solve, ns.solution == "constant" ? 1e-12 : ns.solver_tol, [&] {
        const NahmSolved sol = solve_nahm_spec(ns, ns.config.N);
        const SuAlgebra g(ns.config.m);
        s << "# s, then su(m) coordinates of T0, T1, T2, T3\n";
        for (int i = 0; i < sol.path.size(); ++i) {
          s << sol.path.s(i);
          for (int a = 0; a < 4; ++a)
            for (double c : g.coords(sol.path.T[i][a])) s << " " << c;
          s << "\n";
        }
        return Outcome{sol.residual, ns.solution + " solution", std::nullopt};
      });
      break;
    }
  }
  if (out.report.all_pass()) out.solution = s.str();
  return out;
}

}  // namespace hkreduce
