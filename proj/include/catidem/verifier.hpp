#pragma once

// Named identity suites over the shipped backends.  Each suite pins one
// exactly-checkable statement about the constructions, runs it at a
// configured depth, and returns a machine-readable verdict.  Suites are
// registered data so front ends can list them; negative controls corrupt
// an input on purpose and are expected to fail, and a control that passes
// anyway is counted as broken.

#include <string>
#include <vector>

#include "catidem/idemfactory.hpp"

namespace catidem {

struct CheckSpec {
  std::string suite;
  std::string backend;       // one of the suite's registered backends
  int depth = 0;             // 0 keeps the suite default
  int nmax = 0;              // 0 keeps the suite default
  std::string expect;        // empty keeps the registry default
};

struct Verdict {
  std::string suite;
  std::string claim;         // the statement the suite checks
  std::string backend;
  std::string params;        // rendered, e.g. "depth=5 nmax=4"
  std::string verdict;       // pass | fail | boundary-unverified | skipped
  std::string expected;      // pass | fail
  bool as_expected = false;
  std::string residual_hash; // nonempty exactly when verdict is fail
  std::string witness;       // short human-readable detail
  long long millis = 0;
};

struct SuiteInfo {
  std::string name;
  std::string claim;
  std::vector<std::string> backends;  // poly | baralg | tl2 | tl3
  int default_depth = 4;
  int default_nmax = 4;
  // Smallest depth whose window still has interior degrees for this
  // statement; below it the verdict is boundary-unverified.
  int min_depth = 1;
  std::string expect = "pass";
};

const std::vector<SuiteInfo>& suite_catalog();
const SuiteInfo* find_suite(const std::string& name);

// Runs one suite on one backend.  Throws UnknownSuite for names outside
// the catalog and BackendUnavailable for backends the suite is not
// registered on.  Reruns with the same spec produce identical verdicts
// apart from the timing field.
Verdict run_suite(const CheckSpec& spec);

struct RunAllConfig {
  int depth = 0;  // 0 keeps per-suite defaults
  int nmax = 0;
  int tl_strand_bound = 3;  // tl suites above the bound are skipped
  int jobs = 0;             // worker threads; 0 picks the hardware count
  std::vector<std::string> suites;    // empty selects all
  std::vector<std::string> backends;  // empty selects all per suite
};

struct RunAllReport {
  RunAllConfig config;
  std::vector<Verdict> verdicts;
  int passed = 0;
  int failed = 0;
  int boundary = 0;
  int skipped = 0;
  int broken = 0;  // verdicts that contradict their registered expectation
  bool ok = false;
};
RunAllReport run_all(const RunAllConfig& cfg);

// JSON renderings.  with_timing controls the millis fields; everything
// else is byte-stable across reruns of the same configuration.
std::string verdict_json(const Verdict& v, bool with_timing = true);
std::string report_json(const RunAllReport& r, bool with_timing = true);

}  // namespace catidem
