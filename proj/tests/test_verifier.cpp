#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>

#include <json.hpp>

#include "catidem/backend_poly.hpp"
#include "catidem/idemfactory.hpp"
#include "catidem/serialize.hpp"
#include "catidem/verifier.hpp"

using namespace catidem;

namespace {

PolyBackend& pb() {
  static PolyBackend b(Ring::integers());
  return b;
}

CheckSpec spec_of(const std::string& suite, const std::string& backend,
                  int depth = 0, int nmax = 0) {
  CheckSpec s;
  s.suite = suite;
  s.backend = backend;
  s.depth = depth;
  s.nmax = nmax;
  return s;
}

}  // namespace

TEST_CASE("suite catalog is populated and internally consistent") {
  const std::vector<SuiteInfo>& cat = suite_catalog();
  REQUIRE(cat.size() >= 30);
  std::set<std::string> names;
  std::set<std::string> known = {"poly", "baralg", "tl2", "tl3"};
  int controls = 0;
  for (const SuiteInfo& s : cat) {
    REQUIRE(names.insert(s.name).second);
    REQUIRE_FALSE(s.claim.empty());
    REQUIRE_FALSE(s.backends.empty());
    for (const std::string& b : s.backends) REQUIRE(known.count(b) == 1);
    REQUIRE(s.default_depth >= 1);
    REQUIRE(s.default_nmax >= 1);
    REQUIRE(s.min_depth >= 1);
    if (s.expect == "fail") ++controls;
    REQUIRE(find_suite(s.name) != nullptr);
    REQUIRE(find_suite(s.name)->claim == s.claim);
  }
  REQUIRE(controls == 4);
  REQUIRE(find_suite("no_such_suite") == nullptr);
}

TEST_CASE("content hashes are stable and sensitive") {
  REQUIRE(fnv1a64("") == 14695981039346656037ull);
  REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  REQUIRE(fnv1a64("ab") != fnv1a64("ba"));
  std::string h = hash_hex(fnv1a64("ab"));
  REQUIRE(h.size() == 16);
  REQUIRE(h.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("complex json dumps are deterministic and parseable") {
  CounitalObject cu = poly_counital(pb());
  IdemFactory fac(pb(), cu);
  TruncatedComplex a2 = fac.build_A(2);
  std::string j1 = cx_to_json(a2);
  std::string j2 = cx_to_json(fac.build_A(2));
  REQUIRE(j1 == j2);
  REQUIRE_NOTHROW(nlohmann::json::parse(j1));
  REQUIRE(cx_content_hash(a2) == hash_hex(fnv1a64(j1)));
  REQUIRE(cx_content_hash(a2) != cx_content_hash(fac.build_A(3)));
}

TEST_CASE("chain group tables name the backend and the window") {
  CounitalObject cu = poly_counital(pb());
  IdemFactory fac(pb(), cu);
  std::string t = cx_table(fac.build_A(2));
  REQUIRE(t.find("backend poly") != std::string::npos);
  REQUIRE(t.find("lower edge truncated") != std::string::npos);
  REQUIRE(t.find("deg ") != std::string::npos);
}

TEST_CASE("euler rendering carries the truncation marker") {
  CounitalObject cu = poly_counital(pb());
  IdemFactory fac(pb(), cu);
  std::string truncated = euler_to_string(pb(), euler_series(fac.build_P(3)));
  REQUIRE(truncated.find("O(q^") != std::string::npos);
  std::string exact = euler_to_string(pb(), euler_series(cx_unit(pb())));
  REQUIRE(exact == "1");
}

TEST_CASE("morphism hashes distinguish morphisms") {
  CounitalObject cu = poly_counital(pb());
  BlockMorphism id = bm_identity(pb(), cu.c);
  BlockMorphism z = bm_zero(cu.c, cu.c, 0);
  REQUIRE(bm_content_hash(pb(), id) != bm_content_hash(pb(), z));
  REQUIRE(bm_content_hash(pb(), id) == bm_content_hash(pb(), bm_identity(pb(), cu.c)));
}

TEST_CASE("a single suite runs deterministically") {
  CheckSpec s = spec_of("en_idempotent", "poly", 1, 3);
  Verdict v1 = run_suite(s);
  Verdict v2 = run_suite(s);
  REQUIRE(v1.verdict == "pass");
  REQUIRE(v1.as_expected);
  REQUIRE(verdict_json(v1, false) == verdict_json(v2, false));
  nlohmann::json j = nlohmann::json::parse(verdict_json(v1, true));
  REQUIRE(j.contains("millis"));
  REQUIRE(j.at("suite") == "en_idempotent");
  REQUIRE(j.at("backend") == "poly");
  REQUIRE_FALSE(j.at("claim").get<std::string>().empty());
}

TEST_CASE("defaults fill in when the spec leaves fields empty") {
  CheckSpec s;
  s.suite = "counital_laws";
  Verdict v = run_suite(s);
  REQUIRE(v.backend == "poly");
  REQUIRE(v.verdict == "pass");
  REQUIRE(v.params.find("depth=1") != std::string::npos);
}

TEST_CASE("negative controls fail and are expected to") {
  for (const std::string& name :
       {std::string("nc_broken_delta"), std::string("nc_wrong_homotopy"),
        std::string("nc_recognize_shape"), std::string("nc_counit_order")}) {
    Verdict v = run_suite(spec_of(name, "poly"));
    INFO(name << ": " << v.witness);
    REQUIRE(v.verdict == "fail");
    REQUIRE(v.expected == "fail");
    REQUIRE(v.as_expected);
    REQUIRE_FALSE(v.residual_hash.empty());
  }
}

TEST_CASE("shallow windows report a boundary instead of a verdict") {
  Verdict v = run_suite(spec_of("lemma_A_kills_C", "poly", 1));
  REQUIRE(v.verdict == "boundary-unverified");
  REQUIRE(v.as_expected);
  REQUIRE(v.witness.find("needs depth >= 2") != std::string::npos);
}

TEST_CASE("unknown suites and unregistered backends are rejected") {
  REQUIRE_THROWS_AS(run_suite(spec_of("no_such_suite", "poly")), Error);
  REQUIRE_THROWS_AS(run_suite(spec_of("bar_exactness", "poly")), Error);
  REQUIRE_THROWS_AS(run_suite(spec_of("counital_laws", "zmod")), Error);
}

TEST_CASE("run_all aggregates verdicts and honors the strand bound") {
  RunAllConfig cfg;
  cfg.suites = {"counital_laws", "en_idempotent", "nc_broken_delta"};
  cfg.tl_strand_bound = 2;
  cfg.nmax = 3;
  cfg.jobs = 2;
  RunAllReport r = run_all(cfg);
  REQUIRE(r.verdicts.size() == 9);
  REQUIRE(r.skipped == 2);
  REQUIRE(r.failed == 1);
  REQUIRE(r.passed == 6);
  REQUIRE(r.broken == 0);
  REQUIRE(r.ok);
  for (const Verdict& v : r.verdicts)
    if (v.verdict == "skipped") REQUIRE(v.backend == "tl3");

  std::string j1 = report_json(r, false);
  std::string j2 = report_json(run_all(cfg), false);
  REQUIRE(j1 == j2);
  nlohmann::json j = nlohmann::json::parse(j1);
  REQUIRE(j.at("summary").at("ok") == true);
  REQUIRE(j.at("summary").at("skipped") == 2);
  REQUIRE(j.at("verdicts").size() == 9);
}

TEST_CASE("run_all restricted to one backend stays on it") {
  RunAllConfig cfg;
  cfg.suites = {"bar_image_rank"};
  cfg.backends = {"baralg"};
  cfg.nmax = 3;
  RunAllReport r = run_all(cfg);
  REQUIRE(r.verdicts.size() == 1);
  REQUIRE(r.verdicts[0].backend == "baralg");
  REQUIRE(r.verdicts[0].verdict == "pass");
}
