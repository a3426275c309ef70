#pragma once

// Shared front end for the command-line tool and the python bindings: a
// flat run configuration with validation, session construction for the
// named backends, and the build / euler / stabilize operations producing
// deterministic text artifacts.  All functions are pure compute; file and
// cache handling stays with the callers.

#include <memory>
#include <string>

#include "catidem/idemfactory.hpp"

namespace catidem {

// Every field can come from a config file or a command-line flag.  The
// backend is one of poly | baralg | tl | tl2 | tl3; plain "tl" reads the
// strand count from n, the suffixed forms free n up as a target parameter.
struct RunConfig {
  std::string backend = "poly";
  std::string ring;  // "Z", "Q" or "F<p>"; empty picks Q for baralg, else Z
  int n = 2;         // strands for backend "tl", otherwise a target parameter
  int k = -1;        // layer for target E, power exponent on plain "tl"
  int depth = 4;
  int nmax = 0;      // verification suites only; 0 keeps suite defaults
  int order = 0;     // series truncation order; 0 uses the honest edge bound
  bool reduce = false;
  int tl_bound = 3;  // largest allowed strand count
  int jobs = 0;      // verifier worker threads; 0 picks the hardware count
  std::string cache_dir;
  std::string out;
};

// Throws ConfigInvalid naming the offending field and value.
void validate_config(const RunConfig& cfg);

// The backend registry id the config selects: poly | baralg | tl2 | tl3.
std::string canonical_backend(const RunConfig& cfg);

struct Session {
  std::unique_ptr<Backend> owned;
  const Backend* B = nullptr;
  const TLBackend* tl = nullptr;  // set for tangle backends
  CounitalObject cu;
  std::string backend_id;
};
Session make_session(const RunConfig& cfg);

// Targets: P, A, P_hat, A_hat, E, power.
struct BuildResult {
  std::string target;
  std::string backend_id;
  std::string describes;
  TruncatedComplex cx;
  std::string content_hash;  // of the canonical complex dump
  std::string json;          // metadata document embedding the complex
  std::string table;
};
BuildResult build_target(const RunConfig& cfg, const std::string& target);

// Graded Euler characteristic of the target, rendered as a series string
// with a truncation marker where the window is artificial.
std::string euler_target(const RunConfig& cfg, const std::string& target);

struct StabilizeReport {
  int power = 0;
  int window_from = 0;
  bool matches_normalized = false;
  std::string table;  // of the frozen window
  std::string json;
};
StabilizeReport stabilize_target(const RunConfig& cfg);

// Deterministic cache key for an operation: a hash over every config
// field the result depends on.  Distinct requests get distinct keys.
std::string cache_key(const RunConfig& cfg, const std::string& op,
                      const std::string& target);

}  // namespace catidem
