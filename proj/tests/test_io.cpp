#include "hkreduce/errors.hpp"
#include "hkreduce/pipeline.hpp"
#include "hkreduce/report.hpp"
#include "hkreduce/spec_format.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

using namespace hkreduce;

namespace {

const char* kFlat = R"(kind = "flat"
[flat]
hermitian_dim = 1
[verify]
seed = 3
)";

const char* kA1 = R"(kind = "quiver"
name = "a1"
[quiver]
vertices = 1
edges = []
v = [1]
w = [2]
zeta_R = [0.5]
zeta_C = [1+1i]
[verify]
seed = 1
)";

std::string schema_field(const std::string& text) {
  try {
    spec_from_text(text);
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("value grammar") {
  const SpecDocument d = parse_spec_text(R"(
top = 3
[a.b]
r = 1e-4
z1 = 1+2i
z2 = -0.5i
z3 = i
z4 = -i
z5 = 2.5e-3-1e2i
s = "q\"x\\y\nz"   # trailing comment
t = true
l = [1, [2.5, 3i],
     "x"]
)");
  CHECK(d.get("", "top").as_int("top") == 3);
  CHECK(d.get("a.b", "r").as_real("r") == 1e-4);
  CHECK(d.get("a.b", "z1").as_complex("z1") == std::complex<double>(1, 2));
  CHECK(d.get("a.b", "z2").as_complex("z2") == std::complex<double>(0, -0.5));
  CHECK(d.get("a.b", "z3").as_complex("z3") == std::complex<double>(0, 1));
  CHECK(d.get("a.b", "z4").as_complex("z4") == std::complex<double>(0, -1));
  CHECK(d.get("a.b", "z5").as_complex("z5") == std::complex<double>(2.5e-3, -1e2));
  CHECK(d.get("a.b", "s").as_string("s") == "q\"x\\y\nz");
  CHECK(d.get("a.b", "t").as_bool("t"));
  const auto& l = d.get("a.b", "l").as_list("l");
  REQUIRE(l.size() == 3);
  CHECK(l[1].as_list("l")[1].as_complex("l") == std::complex<double>(0, 3));
  CHECK(d.get("", "top").as_complex("top") == std::complex<double>(3, 0));
  CHECK_THROWS_AS(d.get("a.b", "s").as_real("a.b.s"), SchemaError);
}

TEST_CASE("grammar errors") {
  CHECK_THROWS_AS(parse_spec_text("[a]\nx = 1\nx = 2\n"), SchemaError);
  CHECK_THROWS_AS(parse_spec_text("[a]\n[a]\n"), SchemaError);
  CHECK_THROWS_AS(parse_spec_text("x = [1, 2\n"), SchemaError);
  CHECK_THROWS_AS(parse_spec_text("x = \"open\n"), SchemaError);
  try {
    parse_spec_text("[a]\nx = 1\ny = @\n");
    FAIL("no error");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("minimal specs") {
  const ProblemSpec f = spec_from_text(kFlat);
  CHECK(f.kind == ProblemKind::Flat);
  CHECK(f.flat.hermitian_dim == 1);
  CHECK(f.verify.seed == std::uint64_t{3});
  CHECK(f.hash == fnv1a_hex(kFlat));
  const ProblemSpec q = spec_from_text(kA1);
  CHECK(q.kind == ProblemKind::Quiver);
  CHECK(q.quiver.params.zeta_C[0] == cplx(1, 1));
  CHECK(q.verify.h == 1e-4);
}

TEST_CASE("schema errors name the field") {
  std::string missing = kA1;
  missing.replace(missing.find("zeta_C = [1+1i]\n"), 16, "");
  CHECK(schema_field(missing) == "quiver.zeta_C");
  CHECK(schema_field(std::string(kFlat) + "h = -1e-4\n") == "verify.h");
  CHECK(schema_field(std::string(kFlat) + "colour = 2\n") == "verify.colour");
  CHECK(schema_field(std::string(kFlat) + "checks = [\"nonsense\"]\n") == "verify.checks");
  CHECK(schema_field("kind = \"torus\"\n") == "kind");
  CHECK(schema_field(std::string(kFlat) + "[quiver]\nvertices = 1\n") != "<no error>");
  CHECK_THROWS_AS(parse_spec("/nonexistent/spec.txt"), IOError);
}

TEST_CASE("seed precedence") {
  ProblemSpec s = spec_from_text(kFlat);
  ::setenv("HKREDUCE_SEED", "99", 1);
  CHECK(resolve_seed(s, std::uint64_t{5}) == 5);
  CHECK(resolve_seed(s, std::nullopt) == 3);
  s.verify.seed.reset();
  CHECK(resolve_seed(s, std::nullopt) == 99);
  ::unsetenv("HKREDUCE_SEED");
  CHECK_THROWS_AS(resolve_seed(s, std::nullopt), SchemaError);
}

TEST_CASE("report round trip") {
  VerificationReport r;
  r.spec_hash = "abc";
  r.environment = "env";
  CHECK(parse_structured(emit_structured(r)).checks.empty());
  r.add({"x.one", "anchor, with comma", 1.25e-9, 1e-8, true, 0.5, "note \"q\""});
  r.add({"x.two", "a", std::numeric_limits<double>::infinity(), 1e-3, false, 0.0, "error: boom"});
  CHECK_THROWS_AS(r.add({"x.one", "", 0, 0, true, 0, ""}), InvalidArgument);
  const VerificationReport back = parse_structured(emit_structured(r));
  CHECK(back.spec_hash == "abc");
  REQUIRE(back.checks.size() == 2);
  CHECK(back.checks[0] == r.checks[0]);
  CHECK(std::isinf(back.checks[1].violation));
  CHECK_FALSE(back.all_pass());
  const std::string csv = emit_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\"anchor, with comma\"") != std::string::npos);
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "hkreduce_io_test";
  std::filesystem::remove_all(dir);
  VerificationReport r;
  r.add({"a", "b", 0.0, 1.0, true, 0.0, ""});
  write_report(r, dir.string());
  CHECK(parse_structured(read_text_file((dir / "report.txt").string())) .checks.size() == 1);
  CHECK(read_text_file((dir / "summary.csv").string()) == emit_csv(r));
  CHECK_THROWS_AS(write_text_file((dir / "missing" / "x.txt").string(), "x"), IOError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify on the A1 quotient") {
  const ProblemSpec s = spec_from_text(kA1);
  RunOptions o;
  o.seed = 1;
  const VerificationReport r = run_verify(s, o);
  REQUIRE(r.find("reduction.theorem") != nullptr);
  CHECK(r.find("reduction.theorem")->pass);
  CHECK(r.find("reduction.F_cross_oracle")->pass);
  CHECK(r.find("quiver.pairing_coefficient")->pass);
  CHECK(r.find("reduction.degeneration") == nullptr);
  const VerificationReport again = run_verify(s, o);
  CHECK(emit_csv(r) == emit_csv(again));
}

TEST_CASE("a failed solve marks dependent checks as not run") {
  std::string text = kA1;
  text.replace(text.find("[verify]"), 8, "solver_tol = 1e-300\n[verify]");
  const ProblemSpec s = spec_from_text(text);
  RunOptions o;
  o.seed = 1;
  const VerificationReport r = run_verify(s, o);
  REQUIRE(r.find("quiver.solve") != nullptr);
  CHECK_FALSE(r.find("quiver.solve")->pass);
  const CheckRecord* t = r.find("reduction.theorem");
  REQUIRE(t != nullptr);
  CHECK_FALSE(t->pass);
  CHECK(t->note.rfind("not run", 0) == 0);
}

TEST_CASE("check group selection") {
  const ProblemSpec s = spec_from_text(std::string(kA1) + "checks = [\"theorem\"]\n");
  RunOptions o;
  o.seed = 1;
  const VerificationReport r = run_verify(s, o);
  CHECK(r.find("reduction.theorem") != nullptr);
  CHECK(r.find("twistor.lie_Y") == nullptr);
}

TEST_CASE("Nahm verify") {
  const char* text = R"(kind = "nahm"
[nahm]
m = 2
tau1_diag = [0.5, -0.5]
tau2_diag = [0.3, -0.3]
tau3_diag = [-0.2, 0.2]
L = 15
N = 600
[verify]
seed = 1
)";
  RunOptions o;
  o.seed = 1;
  const VerificationReport r = run_verify(spec_from_text(text), o);
  REQUIRE(r.find("nahm.boundary_pairing") != nullptr);
  CHECK(r.find("nahm.boundary_pairing")->pass);
  CHECK(r.all_pass());
}

TEST_CASE("prequant records") {
  const char* text = R"(kind = "flat"
[flat]
hermitian_dim = 1
[prequant]
zeta_C = [0.5i]
expect_quiver_J = true
expect_quiver_K = false
)";
  const VerificationReport r = run_prequant(spec_from_text(text), {});
  REQUIRE(r.checks.size() == 2);
  CHECK(r.find("prequant.quiver_J")->pass);
  // Re 0 is in the lattice, so expecting false fails
  CHECK_FALSE(r.find("prequant.quiver_K")->pass);
}

}
