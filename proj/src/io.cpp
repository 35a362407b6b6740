#include "gptlab/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gptlab/config.hpp"

namespace gptlab {
namespace {

using Path = std::vector<std::string>;

std::string path_name(const Path& path) {
  std::string out;
  for (const auto& p : path) {
    if (!p.empty() && std::isdigit(static_cast<unsigned char>(p[0])))
      out += "[" + p + "]";
    else
      out += (out.empty() ? "" : ".") + p;
  }
  return out.empty() ? "<root>" : out;
}

// Line (1-based) where the value at `path` starts, or 0. A small scanner is
// enough here because the text already parsed as valid JSON.
int locate_line(const std::string& text, const Path& target) {
  struct Frame {
    bool array;
    std::size_t index = 0;
    std::string key;
    bool expect_key = true;
  };
  std::vector<Frame> stack;
  int line = 1;
  const auto matches = [&] {
    if (stack.size() != target.size()) return false;
    for (std::size_t k = 0; k < stack.size(); ++k) {
      const Frame& f = stack[k];
      if ((f.array ? std::to_string(f.index) : f.key) != target[k]) return false;
    }
    return true;
  };
  const auto at_value = [&] {
    return stack.empty() || stack.back().array || !stack.back().expect_key;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == ':') continue;
    if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().array)
          ++stack.back().index;
        else
          stack.back().expect_key = true;
      }
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      continue;
    }
    if (c == '"' && !at_value()) {
      std::string key;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        key += text[i];
      }
      stack.back().key = std::move(key);
      stack.back().expect_key = false;
      continue;
    }
    if (matches()) return line;
    if (c == '{' || c == '[') {
      stack.push_back({c == '[', 0, {}, true});
      continue;
    }
    if (c == '"') {
      for (++i; i < text.size() && text[i] != '"'; ++i)
        if (text[i] == '\\') ++i;
      continue;
    }
    while (i + 1 < text.size() && std::string_view(",]} \t\r\n").find(text[i + 1]) ==
                                      std::string_view::npos)
      ++i;
  }
  return 0;
}

// Walks a parsed document and raises located errors.
class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {
    try {
      root_ = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("malformed JSON: ") + e.what());
    }
  }

  const Json& root() const { return root_; }

  [[noreturn]] void fail(const Path& path, const std::string& msg) const {
    std::string where = path_name(path);
    if (const int line = locate_line(text_, path)) where += " (line " + std::to_string(line) + ")";
    throw InputError(where + ": " + msg);
  }

  const Json& at(const Json& obj, const Path& path, const std::string& key) const {
    if (!obj.contains(key)) fail(path, "missing field \"" + key + "\"");
    return obj.at(key);
  }

  std::vector<double> numbers(const Json& j, const Path& path,
                              std::optional<std::size_t> length) const {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_number()) {
        Path p = path;
        p.push_back(std::to_string(k));
        fail(p, "expected a number");
      }
      out.push_back(j[k].get<double>());
    }
    if (length && out.size() != *length)
      fail(path, "expected " + std::to_string(*length) + " coefficients, got " +
                     std::to_string(out.size()));
    return out;
  }

  // A d x d matrix given as rows, or flat.
  std::vector<double> matrix(const Json& j, const Path& path, std::size_t d) const {
    if (j.is_array() && !j.empty() && j[0].is_array()) {
      if (j.size() != d) fail(path, "expected " + std::to_string(d) + " rows");
      std::vector<double> out;
      for (std::size_t r = 0; r < d; ++r) {
        Path p = path;
        p.push_back(std::to_string(r));
        const auto row = numbers(j[r], p, d);
        out.insert(out.end(), row.begin(), row.end());
      }
      return out;
    }
    return numbers(j, path, d * d);
  }

  std::vector<CoeffTensor> tensors(const Json& j, const Path& path, const KindPtr& kind,
                                   int slots, Side side) const {
    if (!j.is_array()) fail(path, "expected an array of coefficient arrays");
    const std::size_t len = ipow(static_cast<std::size_t>(kind->slot_dim), slots);
    std::vector<CoeffTensor> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
      Path p = path;
      p.push_back(std::to_string(k));
      out.emplace_back(kind, slots, numbers(j[k], p, len), side);
    }
    return out;
  }

  std::vector<Provenance> tags(const Json& root, const std::string& key, std::size_t count) const {
    if (!root.contains("provenance")) return {};
    const Json& prov = root.at("provenance");
    if (!prov.is_object()) fail({"provenance"}, "expected an object");
    if (!prov.contains(key)) return {};
    const Json& list = prov.at(key);
    const Path path{"provenance", key};
    if (!list.is_array() || list.size() != count)
      fail(path, "expected " + std::to_string(count) + " tags");
    std::vector<Provenance> out;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto p = list[k].is_string() ? provenance_from_string(list[k].get<std::string>())
                                         : std::nullopt;
      if (!p) fail({"provenance", key, std::to_string(k)},
                   "expected \"product\", \"entangled\" or \"unknown\"");
      out.push_back(*p);
    }
    return out;
  }

  KindPtr kind(const Json& root) const {
    const Json& k = at(root, {}, "kind");
    if (!k.is_string()) fail({"kind"}, "expected a string");
    const std::string name = k.get<std::string>();
    if (name == "pauli-qubit") return pauli_qubit_kind();
    if (name == "gbit") return gbit_kind();
    if (name != "custom")
      fail({"kind"}, "unknown kind \"" + name + "\" (pauli-qubit, gbit, custom)");
    const Json& sd = at(root, {}, "slot_dim");
    if (!sd.is_number_integer() || sd.get<int>() < 1) fail({"slot_dim"}, "expected a positive integer");
    const std::size_t d = sd.get<std::size_t>();
    std::string label = "custom";
    if (root.contains("label") && root.at("label").is_string()) label = root.at("label").get<std::string>();
    auto gram = matrix(at(root, {}, "gram"), {"gram"}, d);
    auto unit = numbers(at(root, {}, "unit"), {"unit"}, d);
    try {
      return make_kind(static_cast<int>(d), std::move(gram), std::move(unit), label);
    } catch (const InputError& e) {
      fail({"gram"}, e.what());
    }
  }

 private:
  const std::string& text_;
  Json root_;
};

Json coeffs(const CoeffTensor& x) { return Json(std::vector<double>(x.coeffs().begin(), x.coeffs().end())); }

Json coeff_list(const std::vector<CoeffTensor>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(coeffs(x));
  return out;
}

Json rows(const std::vector<double>& m, std::size_t d) {
  Json out = Json::array();
  for (std::size_t r = 0; r < d; ++r)
    out.push_back(std::vector<double>(m.begin() + static_cast<std::ptrdiff_t>(r * d),
                                      m.begin() + static_cast<std::ptrdiff_t>((r + 1) * d)));
  return out;
}

Json tag_list(const ConeGenerators& c) {
  Json out = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(to_string(c.tag(i)));
  return out;
}

void put_kind(Json& j, const KindPtr& kind) {
  if (same_kind(kind, pauli_qubit_kind())) {
    j["kind"] = "pauli-qubit";
  } else if (same_kind(kind, gbit_kind())) {
    j["kind"] = "gbit";
  } else {
    j["kind"] = "custom";
    j["label"] = kind->label;
    j["slot_dim"] = kind->slot_dim;
    j["gram"] = rows(kind->gram, static_cast<std::size_t>(kind->slot_dim));
    j["unit"] = kind->unit;
  }
}

Json audit_json(const SwapAudit& a) {
  Json j;
  j["mode"] = to_string(a.mode);
  j["tested"] = a.tested;
  j["skipped"] = a.skipped;
  j["sampled"] = a.sampled;
  j["zero_outputs"] = a.zero_outputs;
  j["distinct_outputs"] = a.distinct_outputs;
  j["failure_count"] = a.failure_count;
  j["max_residual"] = a.max_residual;
  Json fails = Json::array();
  for (const auto& f : a.failures)
    fails.push_back({{"triple", {f.first, f.middle, f.last}},
                     {"residual", f.residual},
                     {"certificate_valid", f.certificate_valid}});
  j["failures"] = std::move(fails);
  return j;
}

}  // namespace

TheoryFile parse_theory(const std::string& text) {
  const Reader rd(text);
  const Json& root = rd.root();
  if (!root.is_object()) rd.fail({}, "expected an object");
  TheoryFile out;
  const KindPtr kind = rd.kind(root);
  std::string name = "theory";
  if (root.contains("name")) {
    if (!root.at("name").is_string()) rd.fail({"name"}, "expected a string");
    name = root.at("name").get<std::string>();
  }
  auto p2 = rd.tensors(rd.at(root, {}, "P2"), {"P2"}, kind, 2, Side::Effect);
  auto d2 = rd.tensors(rd.at(root, {}, "D2"), {"D2"}, kind, 2, Side::State);
  auto p2_tags = rd.tags(root, "P2", p2.size());
  auto d2_tags = rd.tags(root, "D2", d2.size());
  std::optional<std::vector<CoeffTensor>> es;
  if (root.contains("effect_space"))
    es = rd.tensors(root.at("effect_space"), {"effect_space"}, kind, 1, Side::Effect);
  out.spec = make_theory(name, ConeGenerators(kind, 2, Side::Effect, "P", std::move(p2), std::move(p2_tags)),
                         ConeGenerators(kind, 2, Side::State, "D", std::move(d2), std::move(d2_tags)),
                         std::move(es));

  if (root.contains("strategy")) {
    const Json& sj = root.at("strategy");
    const Path sp{"strategy"};
    if (!sj.is_object()) rd.fail(sp, "expected an object");
    const std::size_t d = static_cast<std::size_t>(kind->slot_dim);
    Strategy s;
    s.link_state = CoeffTensor(kind, 2, rd.numbers(rd.at(sj, sp, "link_state"), {"strategy", "link_state"}, d * d),
                               Side::State);
    s.measurement = rd.tensors(rd.at(sj, sp, "measurement"), {"strategy", "measurement"}, kind, 2, Side::Effect);
    const Json& cj = rd.at(sj, sp, "corrections");
    if (!cj.is_array() || cj.size() != s.measurement.size())
      rd.fail({"strategy", "corrections"}, "expected one matrix per measurement outcome");
    for (std::size_t k = 0; k < cj.size(); ++k)
      s.corrections.push_back(rd.matrix(cj[k], {"strategy", "corrections", std::to_string(k)}, d));
    const Json& corr = rd.at(sj, sp, "correlators");
    const Path cp{"strategy", "correlators"};
    const auto one = [&](const char* key) {
      Path p = cp;
      p.push_back(key);
      return CoeffTensor(kind, 1, rd.numbers(rd.at(corr, cp, key), p, d), Side::Effect);
    };
    s.setting = {one("A0"), one("A1"), one("B0"), one("B1")};
    if (sj.contains("group_law")) {
      const Json& gj = sj.at("group_law");
      const std::size_t k = s.measurement.size();
      const Path gp{"strategy", "group_law"};
      if (!gj.is_array() || gj.size() != k) rd.fail(gp, "expected a square table over the outcomes");
      std::vector<std::vector<int>> law;
      for (std::size_t a = 0; a < k; ++a) {
        Path rp = gp;
        rp.push_back(std::to_string(a));
        if (!gj[a].is_array() || gj[a].size() != k) rd.fail(rp, "expected " + std::to_string(k) + " entries");
        std::vector<int> row;
        for (const auto& v : gj[a]) {
          if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<std::size_t>() >= k)
            rd.fail(rp, "entries must be outcome indices");
          row.push_back(v.get<int>());
        }
        law.push_back(std::move(row));
      }
      s.group_law = std::move(law);
    }
    out.strategy = std::move(s);
  }
  return out;
}

TheoryFile read_theory(const std::string& path) { return parse_theory(read_text(path)); }

Json theory_to_json(const TheorySpec& spec, const Strategy* strategy) {
  Json j;
  j["name"] = spec.name;
  put_kind(j, spec.kind);
  j["P2"] = coeff_list(spec.P2.generators());
  j["D2"] = coeff_list(spec.D2.generators());
  j["provenance"] = {{"P2", tag_list(spec.P2)}, {"D2", tag_list(spec.D2)}};
  if (spec.effect_space) j["effect_space"] = coeff_list(*spec.effect_space);
  if (strategy) {
    const std::size_t d = static_cast<std::size_t>(spec.kind->slot_dim);
    Json s;
    s["link_state"] = coeffs(strategy->link_state);
    s["measurement"] = coeff_list(strategy->measurement);
    Json corr = Json::array();
    for (const auto& m : strategy->corrections) corr.push_back(rows(m, d));
    s["corrections"] = std::move(corr);
    s["correlators"] = {{"A0", coeffs(strategy->setting.A0)},
                        {"A1", coeffs(strategy->setting.A1)},
                        {"B0", coeffs(strategy->setting.B0)},
                        {"B1", coeffs(strategy->setting.B1)}};
    if (strategy->group_law) s["group_law"] = *strategy->group_law;
    j["strategy"] = std::move(s);
  }
  return j;
}

SwapGraph parse_graph(const std::string& text) {
  const Reader rd(text);
  const Json& root = rd.root();
  if (!root.is_object()) rd.fail({}, "expected an object");
  const Json& mj = rd.at(root, {}, "m");
  if (!mj.is_number_integer() || mj.get<long long>() < 0) rd.fail({"m"}, "expected a nonnegative integer");
  SwapGraph g;
  g.m = mj.get<int>();
  for (const char* key : {"E", "F"}) {
    auto& set = key[0] == 'E' ? g.E : g.F;
    if (!root.contains(key)) continue;
    const Json& list = root.at(key);
    if (!list.is_array()) rd.fail({key}, "expected an array of [i, j] pairs");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Json& e = list[k];
      const Path p{key, std::to_string(k)};
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        rd.fail(p, "expected an [i, j] pair of integers");
      const int i = e[0].get<int>();
      const int j = e[1].get<int>();
      if (i < 1 || j < 1 || i > g.m || j > g.m)
        rd.fail(p, "indices run from 1 to m = " + std::to_string(g.m));
      set.emplace(i - 1, j - 1);
    }
  }
  return g;
}

SwapGraph read_graph(const std::string& path) { return parse_graph(read_text(path)); }

Json graph_to_json(const SwapGraph& g) {
  Json j;
  j["m"] = g.m;
  for (const char* key : {"E", "F"}) {
    Json list = Json::array();
    for (const auto& [a, b] : key[0] == 'E' ? g.E : g.F) list.push_back({a + 1, b + 1});
    j[key] = std::move(list);
  }
  return j;
}

Json extended_to_json(const TheorySpec& spec, int n, const ExtendedCones& cones) {
  Json j;
  j["name"] = spec.name;
  put_kind(j, spec.kind);
  j["n"] = n;
  j["P"] = coeff_list(cones.P.generators());
  j["D"] = coeff_list(cones.D.generators());
  j["provenance"] = {{"P", tag_list(cones.P)}, {"D", tag_list(cones.D)}};
  return j;
}

Json report_to_json(const TheorySpec& spec, const ConsistencyReport& r) {
  Json j;
  j["command"] = "check";
  j["theory"] = spec.name;
  j["consistent"] = r.consistent;
  j["first_failure"] = r.first_failure;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["id"] = c.id;
    e["name"] = c.name;
    e["tag"] = c.tag;
    e["status"] = to_string(c.status);
    e["detail"] = c.detail;
    e["value"] = c.value;
    e["witness"] = c.witness;
    e["certificate"] = c.certificate;
    e["seconds"] = c.seconds;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["swap_audit"] = r.swap_audit ? audit_json(*r.swap_audit) : Json(nullptr);
  j["dual_audit"] = r.dual_audit ? audit_json(*r.dual_audit) : Json(nullptr);
  j["seconds"] = r.seconds;
  return j;
}

Json chsh_to_json(const TheorySpec& spec, const ChshWitness& w) {
  Json j;
  j["command"] = "chsh";
  j["theory"] = spec.name;
  j["value"] = w.value;
  j["raw"] = w.raw;
  j["witness"] = {{"state", w.state}, {"A0", w.a0}, {"A1", w.a1}, {"B0", w.b0}, {"B1", w.b1}};
  return j;
}

Json game_to_json(const GameResult& r) {
  Json j;
  j["rounds"] = r.rounds;
  j["beta"] = r.beta;
  j["probability_sum"] = r.probability_sum;
  j["zero_branches"] = r.zero_branches;
  j["fell_back"] = r.fell_back;
  j["note"] = r.note;
  j["class_probability"] = r.class_probability;
  j["branches"] = r.table.size();
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace gptlab
