#include "catidem/driver.hpp"

#include <json.hpp>

#include "catidem/backend_baralg.hpp"
#include "catidem/backend_poly.hpp"
#include "catidem/backend_tl.hpp"
#include "catidem/serialize.hpp"

namespace catidem {

namespace {

using nlohmann::json;

Ring parse_ring(const std::string& s, const std::string& backend_id) {
  if (s.empty()) return backend_id == "baralg" ? Ring::rationals() : Ring::integers();
  if (s == "Z") return Ring::integers();
  if (s == "Q") return Ring::rationals();
  if (s.size() > 1 && s[0] == 'F') {
    std::int64_t p = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        fail("ConfigInvalid", "ring '" + s + "' is not Z, Q or F<prime>");
      p = p * 10 + (s[i] - '0');
    }
    return Ring::prime_field(p);
  }
  fail("ConfigInvalid", "ring '" + s + "' is not Z, Q or F<prime>");
}

int strands_of(const RunConfig& cfg) {
  if (cfg.backend == "tl") return cfg.n;
  if (cfg.backend == "tl2") return 2;
  if (cfg.backend == "tl3") return 3;
  return 0;
}

int power_exponent(const RunConfig& cfg) {
  if (cfg.backend == "tl") return cfg.k < 0 ? 2 : cfg.k;
  return cfg.n;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  if (cfg.backend != "poly" && cfg.backend != "baralg" &&
      cfg.backend != "tl" && cfg.backend != "tl2" && cfg.backend != "tl3")
    fail("ConfigInvalid", "backend '" + cfg.backend +
                              "' is not poly, baralg, tl, tl2 or tl3");
  if (cfg.depth < 1)
    fail("ConfigInvalid",
         "depth must be at least 1, got " + std::to_string(cfg.depth));
  if (cfg.order < 0)
    fail("ConfigInvalid",
         "order must be nonnegative, got " + std::to_string(cfg.order));
  if (cfg.nmax < 0)
    fail("ConfigInvalid",
         "nmax must be nonnegative, got " + std::to_string(cfg.nmax));
  if (cfg.jobs < 0)
    fail("ConfigInvalid",
         "jobs must be nonnegative, got " + std::to_string(cfg.jobs));
  int strands = strands_of(cfg);
  if (strands != 0) {
    if (strands < 2)
      fail("ConfigInvalid", "tangle backends need at least 2 strands, got " +
                                std::to_string(strands));
    if (strands > cfg.tl_bound)
      fail("ConfigInvalid", "strand count " + std::to_string(strands) +
                                " exceeds the configured bound " +
                                std::to_string(cfg.tl_bound));
  }
  parse_ring(cfg.ring, canonical_backend(cfg));
}

std::string canonical_backend(const RunConfig& cfg) {
  if (cfg.backend == "tl") return "tl" + std::to_string(cfg.n);
  return cfg.backend;
}

Session make_session(const RunConfig& cfg) {
  validate_config(cfg);
  Session s;
  s.backend_id = canonical_backend(cfg);
  Ring R = parse_ring(cfg.ring, s.backend_id);
  if (s.backend_id == "poly") {
    auto b = std::make_unique<PolyBackend>(R);
    s.cu = poly_counital(*b);
    s.owned = std::move(b);
  } else if (s.backend_id == "baralg") {
    auto b = std::make_unique<BarBackend>(R);
    s.cu = bar_counital(*b);
    s.owned = std::move(b);
  } else {
    auto b = std::make_unique<TLBackend>(strands_of(cfg), R);
    s.cu = tl_cup_counital(*b, {{0, 1}});
    s.tl = b.get();
    s.owned = std::move(b);
  }
  s.B = s.owned.get();
  return s;
}

namespace {

struct Built {
  TruncatedComplex cx;
  std::string describes;
};

Built construct(const RunConfig& cfg, const std::string& target,
                Session& s) {
  if (target == "P") {
    IdemFactory fac(*s.B, s.cu);
    return {fac.build_P(cfg.depth),
            "bar-type complex with the (k+1)-st carrier power in degree -k"};
  }
  if (target == "A") {
    IdemFactory fac(*s.B, s.cu);
    return {fac.build_A(cfg.depth),
            "cone of the counit map from the bar-type complex to the unit"};
  }
  if (target == "P_hat") {
    IdemFactory fac(*s.B, s.cu);
    return {fac.build_normalized(cfg.depth).P,
            "image model with im e_(k+1) in degree -k"};
  }
  if (target == "A_hat") {
    IdemFactory fac(*s.B, s.cu);
    return {fac.build_normalized(cfg.depth).A,
            "image model of the cone with im e_k in degree -k"};
  }
  if (target == "power") {
    IdemFactory fac(*s.B, s.cu);
    int m = power_exponent(cfg);
    if (m < 0)
      fail("ConfigInvalid",
           "power exponent must be nonnegative, got " + std::to_string(m));
    return {cx_single(*s.B, fac.power(m), 0),
            "carrier power " + std::to_string(m) + " as a one-term complex"};
  }
  if (target == "E") {
    if (s.tl == nullptr)
      fail("ConfigInvalid", "target E needs a tangle backend");
    int n = s.tl->strands();
    int layer = cfg.k < 0 ? n : cfg.k;
    if (layer < 0 || layer > n || (n - layer) % 2 != 0)
      fail("ConfigInvalid", "layer " + std::to_string(layer) +
                                " is not admissible on " + std::to_string(n) +
                                " strands");
    TLFamily fam = tl_family(*s.tl, cfg.depth, false);
    for (TLFamilyMember& m : fam.members)
      if (m.k == layer)
        return {std::move(m.E), "layer " + std::to_string(layer) +
                                    " cone of the tangle tower on " +
                                    std::to_string(n) + " strands"};
    fail("ConfigInvalid", "layer " + std::to_string(layer) +
                              " is outside the computed tower");
  }
  fail("ConfigInvalid",
       "target '" + target + "' is not P, A, P_hat, A_hat, E or power");
}

}  // namespace

BuildResult build_target(const RunConfig& cfg, const std::string& target) {
  Session s = make_session(cfg);
  Built b = construct(cfg, target, s);
  BuildResult out;
  out.target = target;
  out.backend_id = s.backend_id;
  out.describes = b.describes;
  out.cx = cfg.reduce ? cx_canonicalize(gaussian_reduce(b.cx).cx)
                      : std::move(b.cx);
  std::string cxj = cx_to_json(out.cx);
  out.content_hash = hash_hex(fnv1a64(cxj));
  out.table = cx_table(out.cx);

  json doc;
  doc["target"] = out.target;
  doc["backend"] = out.backend_id;
  doc["ring"] = parse_ring(cfg.ring, s.backend_id).to_string();
  doc["depth"] = cfg.depth;
  doc["params"] = {{"n", cfg.n}, {"k", cfg.k}, {"reduced", cfg.reduce}};
  doc["describes"] = out.describes;
  doc["content_hash"] = out.content_hash;
  doc["complex"] = json::parse(cxj);
  out.json = doc.dump(2);
  return out;
}

std::string euler_target(const RunConfig& cfg, const std::string& target) {
  Session s = make_session(cfg);
  Built b = construct(cfg, target, s);
  return euler_to_string(*s.B, euler_series(b.cx), cfg.order);
}

StabilizeReport stabilize_target(const RunConfig& cfg) {
  Session s = make_session(cfg);
  IdemFactory fac(*s.B, s.cu);
  Stabilization st = fac.stabilize_power(cfg.depth);
  StabilizeReport rep;
  rep.power = st.power;
  rep.window_from = st.window_from;
  rep.matches_normalized = st.matches_normalized;
  rep.table = cx_table(st.stable);
  json doc;
  doc["backend"] = s.backend_id;
  doc["depth"] = cfg.depth;
  doc["power"] = rep.power;
  doc["window_from"] = rep.window_from;
  doc["matches_normalized"] = rep.matches_normalized;
  doc["stable"] = json::parse(cx_to_json(st.stable));
  rep.json = doc.dump(2);
  return rep;
}

std::string cache_key(const RunConfig& cfg, const std::string& op,
                      const std::string& target) {
  std::string req = op + "|" + target + "|" + canonical_backend(cfg) + "|" +
                    parse_ring(cfg.ring, canonical_backend(cfg)).to_string() +
                    "|n=" + std::to_string(cfg.n) +
                    "|k=" + std::to_string(cfg.k) +
                    "|depth=" + std::to_string(cfg.depth) +
                    "|order=" + std::to_string(cfg.order) +
                    "|reduce=" + (cfg.reduce ? "1" : "0");
  return hash_hex(fnv1a64(req));
}

}  // namespace catidem
