#include "catidem/serialize.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace catidem {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace {

json summand_json(const Summand& s) {
  json j;
  j["word"] = s.word;
  j["shift"] = s.shift;
  if (s.idem) j["image"] = s.idem_tag;
  return j;
}

json bm_entries_json(const Backend& B, const BlockMorphism& m) {
  json entries = json::array();
  for (const auto& [key, e] : m.entries) {
    if (B.is_zero(e)) continue;
    json je;
    je["row"] = key.first;
    je["col"] = key.second;
    je["elem"] = B.elem_repr(e);
    entries.push_back(std::move(je));
  }
  return entries;
}

}  // namespace

std::string cx_to_json(const TruncatedComplex& x) {
  if (x.B == nullptr) fail("NoBackend", "complex has no backend attached");
  const Backend& B = *x.B;
  json j;
  j["backend"] = B.name();
  j["ring"] = B.ring().to_string();
  j["window"] = {{"lo", x.lo},
                 {"hi", x.hi},
                 {"lo_artificial", x.lo_artificial},
                 {"hi_artificial", x.hi_artificial}};
  json degrees = json::array();
  for (int k = x.hi; k >= x.lo; --k) {
    json jd;
    jd["deg"] = k;
    json sums = json::array();
    for (const Summand& s : x.at(k).summands) sums.push_back(summand_json(s));
    jd["summands"] = std::move(sums);
    degrees.push_back(std::move(jd));
  }
  j["degrees"] = std::move(degrees);
  json diffs = json::array();
  for (int k = x.hi - 1; k >= x.lo; --k) {
    json jd;
    jd["deg"] = k;
    jd["entries"] = bm_entries_json(B, x.d(k));
    diffs.push_back(std::move(jd));
  }
  j["differentials"] = std::move(diffs);
  return j.dump(2);
}

std::string cx_content_hash(const TruncatedComplex& x) {
  return hash_hex(fnv1a64(cx_to_json(x)));
}

std::string summand_to_string(const Summand& s) {
  std::string out;
  if (s.shift != 0) out += "q^" + std::to_string(s.shift) + " ";
  out += s.word;
  if (s.idem) out += "[" + s.idem_tag + "]";
  return out;
}

std::string cx_table(const TruncatedComplex& x) {
  std::ostringstream os;
  if (x.B != nullptr)
    os << "backend " << x.B->name() << ", ring " << x.B->ring().to_string()
       << ", window [" << x.lo << ", " << x.hi << "]";
  if (x.lo_artificial) os << ", lower edge truncated";
  if (x.hi_artificial) os << ", upper edge truncated";
  os << "\n";
  for (int k = x.hi; k >= x.lo; --k) {
    os << "deg ";
    std::string d = std::to_string(k);
    for (std::size_t i = d.size(); i < 3; ++i) os << ' ';
    os << d << ": ";
    const FormalObject& o = x.at(k);
    if (o.is_zero_object()) {
      os << "0\n";
      continue;
    }
    // run-length over equal consecutive summands (already sorted)
    bool first = true;
    for (int i = 0; i < o.size();) {
      int j = i;
      while (j < o.size() && o.summands[j].word == o.summands[i].word &&
             o.summands[j].shift == o.summands[i].shift &&
             o.summands[j].idem_tag == o.summands[i].idem_tag)
        ++j;
      if (!first) os << " (+) ";
      if (j - i > 1) os << (j - i) << " x ";
      os << summand_to_string(o.summands[i]);
      first = false;
      i = j;
    }
    os << "\n";
  }
  return os.str();
}

std::string bm_content_hash(const Backend& B, const BlockMorphism& m) {
  std::ostringstream os;
  os << "deg " << m.degree << "\nsrc";
  for (const Summand& s : m.src.summands) os << " " << summand_to_string(s);
  os << "\ndst";
  for (const Summand& s : m.dst.summands) os << " " << summand_to_string(s);
  os << "\n";
  for (const auto& [key, e] : m.entries) {
    if (B.is_zero(e)) continue;
    os << key.first << "," << key.second << ": " << B.elem_repr(e) << "\n";
  }
  return hash_hex(fnv1a64(os.str()));
}

std::string euler_to_string(const Backend& B, const EulerResult& e,
                            int max_order) {
  int order = 0;
  bool truncate = !e.exact;
  if (truncate) {
    order = e.edge_min_shift;
    if (max_order > 0) order = std::min(order, max_order);
  } else if (max_order > 0) {
    for (const auto& [word, poly] : e.classes)
      if (!poly.is_zero() && poly.max_exp() >= max_order) truncate = true;
    if (truncate) order = max_order;
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [word, poly] : e.classes) {
    LaurentPoly p = truncate ? poly.truncated(order) : poly;
    if (p.is_zero()) continue;
    if (!first) os << " + ";
    if (word == B.unit_word()) {
      os << p.to_string();
    } else {
      os << "(" << p.to_string() << ") [" << word << "]";
    }
    first = false;
  }
  if (first) os << "0";
  if (truncate) os << " + O(q^" << order << ")";
  return os.str();
}

}  // namespace catidem
