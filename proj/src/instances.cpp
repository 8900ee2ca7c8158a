#include "chase/instances.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "chase/rng.hpp"

namespace chase {
namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------- hypercube

// Face {x_axis = sign} of [-1,1]^d as a (degenerate) body.
Request cube_face(Index d, Index axis, double sign) {
  Matrix a(2 * d, d);
  Vector b(2 * d);
  a.setZero();
  for (Index j = 0; j < d; ++j) {
    a(2 * j, j) = 1.0;
    a(2 * j + 1, j) = -1.0;
    if (j == axis) {
      b[2 * j] = sign;
      b[2 * j + 1] = -sign;
    } else {
      b[2 * j] = 1.0;
      b[2 * j + 1] = 1.0;
    }
  }
  return Request(HPolytoped(std::move(a), std::move(b)));
}

// Ambient-norm distance from `pos` to the face {x_axis = sign} of the cube.
double face_distance(const Vector& pos, Index axis, double sign, NormTag tag) {
  Vector q = pos.cwiseMax(-1.0).cwiseMin(1.0);
  q[axis] = sign;
  return norm(Vector(pos - q), tag);
}

class HypercubeFacesSource final : public RequestSource {
 public:
  HypercubeFacesSource(HypercubeFacesSpec spec, NormTag tag) : spec_(spec), tag_(tag) {}

  Index dim() const override { return spec_.d; }
  NormTag norm() const override { return tag_; }
  Index count() const override { return spec_.n; }

  Request next(const Vector& pos) override {
    Index face;
    if (!spec_.adaptive) {
      face = 2 * (served_ % spec_.d) + (((served_ / spec_.d) % 2) ? 1 : 0);
    } else {
      // Farthest signed face from the chaser, never the one just played.
      face = -1;
      double best = -1.0;
      for (Index id = 0; id < 2 * spec_.d; ++id) {
        if (id == last_face_) continue;
        double dist = face_distance(pos, id / 2, id % 2 ? -1.0 : 1.0, tag_);
        if (dist > best + 1e-15) {
          best = dist;
          face = id;
        }
      }
    }
    ++served_;
    last_face_ = face;
    return cube_face(spec_.d, face / 2, face % 2 ? -1.0 : 1.0);
  }

 private:
  HypercubeFacesSpec spec_;
  NormTag tag_;
  Index served_ = 0;
  Index last_face_ = -1;
};

// ------------------------------------------------------------- random specs

Instance generate_nested(const NestedCutsSpec& s, NormTag tag) {
  SampleStream g(s.seed, 0);
  Vector core(s.d);
  for (Index j = 0; j < s.d; ++j) core[j] = 0.6 * (g.next_unit() - 0.5);

  Matrix rows(2 * s.d + s.n, s.d);
  Vector offs(2 * s.d + s.n);
  rows.setZero();
  for (Index j = 0; j < s.d; ++j) {
    rows(2 * j, j) = 1.0;
    offs[2 * j] = 1.0;
    rows(2 * j + 1, j) = -1.0;
    offs[2 * j + 1] = 1.0;
  }
  Instance inst(s.d, tag);
  for (Index k = 0; k < s.n; ++k) {
    Vector u;
    do {
      u = sample_gaussian(g, s.d);
    } while (u.norm() <= 1e-12);
    u /= u.norm();
    const Index r = 2 * s.d + k;
    rows.row(r) = u.transpose();
    offs[r] = u.dot(core) + 0.02 + 0.4 * std::pow(0.82, double(k));
    inst.push_back(Request(HPolytoped(rows.topRows(r + 1), offs.head(r + 1))));
  }
  return inst;
}

Instance generate_random_bodies(const RandomBodiesSpec& s, NormTag tag) {
  Instance inst(s.d, tag);
  for (Index k = 0; k < s.n; ++k) {
    SampleStream g(s.seed, std::uint64_t(k) + 1);
    Vector c(s.d), w(s.d);
    for (Index j = 0; j < s.d; ++j) {
      c[j] = 0.6 * s.scale * g.next_symmetric();
      w[j] = s.scale * (0.05 + 0.35 * g.next_unit());
    }
    if (g.next_unit() < 0.35) w[Index(g.next_u64() % std::uint64_t(s.d))] *= 0.02;  // slab
    const bool cut = g.next_unit() < 0.4;
    Matrix a(2 * s.d + (cut ? 1 : 0), s.d);
    Vector b(a.rows());
    a.setZero();
    for (Index j = 0; j < s.d; ++j) {
      a(2 * j, j) = 1.0;
      b[2 * j] = c[j] + w[j];
      a(2 * j + 1, j) = -1.0;
      b[2 * j + 1] = -(c[j] - w[j]);
    }
    if (cut) {
      Vector u;
      do {
        u = sample_gaussian(g, s.d);
      } while (u.norm() <= 1e-12);
      u /= u.norm();
      a.row(2 * s.d) = u.transpose();
      b[2 * s.d] = u.dot(c) + 0.15 * s.scale;
    }
    inst.push_back(Request(HPolytoped(std::move(a), std::move(b))));
  }
  return inst;
}

Instance generate_random_funcs(const RandomMaxAffineSpec& s, NormTag tag) {
  Instance inst(s.d, tag);
  for (Index k = 0; k < s.n; ++k) {
    SampleStream g(s.seed, std::uint64_t(k) + 1);
    Matrix a(s.pieces + 1, s.d);
    Vector c(s.pieces + 1);
    a.row(0).setZero();
    c[0] = 0.0;
    for (Index p = 1; p <= s.pieces; ++p) {
      Vector grad = (0.3 + 0.7 * g.next_unit()) * sample_gaussian(g, s.d);
      Vector anchor(s.d);
      for (Index j = 0; j < s.d; ++j) anchor[j] = 1.2 * g.next_symmetric();
      a.row(p) = grad.transpose();
      c[p] = -grad.dot(anchor);  // the piece vanishes at its anchor
    }
    inst.push_back(Request(MaxAffined(std::move(a), std::move(c))));
  }
  return inst;
}

void check_common(Index d, Index n) {
  if (d < 1) throw ValidationError("generator needs dimension >= 1");
  if (n < 1) throw ValidationError("generator needs at least one request");
}

// ------------------------------------------------------------ serialization

[[noreturn]] void missing(const std::string& where) {
  throw ValidationError("instance is missing field '" + where + "'");
}

double number_at(const ordered_json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("field '" + where + "' must be a number");
  return v.get<double>();
}

}  // namespace

Instance generate(const GeneratorSpec& spec) {
  return std::visit(
      [&](const auto& s) -> Instance {
        using S = std::decay_t<decltype(s)>;
        check_common(s.d, s.n);
        if constexpr (std::is_same_v<S, HypercubeFacesSpec>) {
          if (s.adaptive)
            throw ValidationError(
                "adaptive adversaries have no offline form; run them through make_source "
                "and save the realized sequence");
          HypercubeFacesSource src(s, spec.norm);
          Instance inst(s.d, spec.norm);
          const Vector origin = Vector::Zero(s.d);
          for (Index i = 0; i < s.n; ++i) inst.push_back(src.next(origin));
          return inst;
        } else if constexpr (std::is_same_v<S, NestedCutsSpec>) {
          return generate_nested(s, spec.norm);
        } else if constexpr (std::is_same_v<S, RandomBodiesSpec>) {
          if (s.scale <= 0.0) throw ValidationError("random-bodies scale must be positive");
          return generate_random_bodies(s, spec.norm);
        } else {
          if (s.pieces < 1) throw ValidationError("random-funcs needs at least one piece");
          return generate_random_funcs(s, spec.norm);
        }
      },
      spec.family);
}

std::unique_ptr<RequestSource> make_source(const GeneratorSpec& spec) {
  if (const auto* hc = std::get_if<HypercubeFacesSpec>(&spec.family)) {
    check_common(hc->d, hc->n);
    return std::make_unique<HypercubeFacesSource>(*hc, spec.norm);
  }
  return std::make_unique<InstanceSource>(generate(spec));
}

GeneratorSpec parse_generator(const std::string& text, NormTag norm) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  GeneratorSpec spec;
  spec.norm = norm;

  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ValidationError("generator option '" + item + "' is not key=value");
      std::string key = item.substr(0, eq);
      if (key == "N") key = "n";  // request-count key is accepted in either case
      kv[key] = item.substr(eq + 1);
    }
  }
  auto take_int = [&](const std::string& key, Index fallback) -> Index {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    Index v = Index(std::stoll(it->second));
    kv.erase(it);
    return v;
  };
  auto take_double = [&](const std::string& key, double fallback) -> double {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double v = std::stod(it->second);
    kv.erase(it);
    return v;
  };

  if (family == "hypercube") {
    HypercubeFacesSpec s;
    s.d = take_int("d", s.d);
    s.n = take_int("n", s.n);
    s.adaptive = take_int("adaptive", 0) != 0;
    spec.family = s;
  } else if (family == "nested") {
    NestedCutsSpec s;
    s.d = take_int("d", s.d);
    s.n = take_int("n", s.n);
    s.seed = std::uint64_t(take_int("seed", 0));
    spec.family = s;
  } else if (family == "random-bodies") {
    RandomBodiesSpec s;
    s.d = take_int("d", s.d);
    s.n = take_int("n", s.n);
    s.seed = std::uint64_t(take_int("seed", 0));
    s.scale = take_double("scale", s.scale);
    spec.family = s;
  } else if (family == "random-funcs") {
    RandomMaxAffineSpec s;
    s.d = take_int("d", s.d);
    s.n = take_int("n", s.n);
    s.seed = std::uint64_t(take_int("seed", 0));
    s.pieces = take_int("pieces", s.pieces);
    spec.family = s;
  } else {
    throw ValidationError("unknown generator family '" + family +
                          "' (expected hypercube, nested, random-bodies or random-funcs)");
  }
  if (!kv.empty())
    throw ValidationError("unknown generator option '" + kv.begin()->first + "' for family '" +
                          family + "'");
  return spec;
}

std::string to_json_string(const Instance& inst) {
  ordered_json j;
  j["dim"] = inst.dim();
  j["norm"] = to_string(inst.norm());
  j["requests"] = ordered_json::array();
  for (Index i = 0; i < inst.size(); ++i) {
    const Request& r = inst.request(i);
    ordered_json e;
    if (r.is_body()) {
      e["type"] = "body";
      ordered_json rows = ordered_json::array();
      for (Index k = 0; k < r.body().size(); ++k) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < inst.dim(); ++c) row.push_back(r.body().a()(k, c));
        rows.push_back(std::move(row));
      }
      e["A"] = std::move(rows);
      ordered_json b = ordered_json::array();
      for (Index k = 0; k < r.body().size(); ++k) b.push_back(r.body().b()[k]);
      e["b"] = std::move(b);
    } else {
      e["type"] = "func";
      ordered_json pieces = ordered_json::array();
      for (Index k = 0; k < r.func().pieces(); ++k) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < inst.dim(); ++c) row.push_back(r.func().gradients()(k, c));
        row.push_back(r.func().intercepts()[k]);
        pieces.push_back(std::move(row));
      }
      e["pieces"] = std::move(pieces);
    }
    j["requests"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

Instance parse_instance(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance JSON root must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "dim" && key != "norm" && key != "requests")
      throw ParseError("unknown field '" + key + "' in instance");
  }
  if (!j.contains("dim")) missing("dim");
  if (!j["dim"].is_number_integer()) throw ParseError("field 'dim' must be an integer");
  const Index d = j["dim"].get<Index>();
  if (!j.contains("norm")) missing("norm");
  if (!j["norm"].is_string()) throw ParseError("field 'norm' must be a string");
  Instance inst(d, parse_norm(j["norm"].get<std::string>()));
  if (!j.contains("requests")) missing("requests");
  if (!j["requests"].is_array()) throw ParseError("field 'requests' must be an array");

  Index idx = 0;
  for (const auto& e : j["requests"]) {
    const std::string where = "requests[" + std::to_string(idx) + "]";
    if (!e.is_object()) throw ParseError(where + " must be an object");
    if (!e.contains("type")) missing(where + ".type");
    if (!e["type"].is_string()) throw ParseError(where + ".type must be a string");
    const std::string type = e["type"].get<std::string>();

    if (type == "body") {
      for (const auto& [key, value] : e.items()) {
        (void)value;
        if (key != "type" && key != "A" && key != "b")
          throw ParseError("unknown field '" + key + "' in " + where);
      }
      if (!e.contains("A")) missing(where + ".A");
      if (!e.contains("b")) missing(where + ".b");
      if (!e["A"].is_array() || e["A"].empty()) throw ParseError(where + ".A must be a nonempty array");
      if (!e["b"].is_array()) throw ParseError(where + ".b must be an array");
      const Index rows = Index(e["A"].size());
      if (Index(e["b"].size()) != rows)
        throw ParseError(where + ": A and b disagree on the number of rows");
      Matrix a(rows, d);
      Vector b(rows);
      for (Index k = 0; k < rows; ++k) {
        const auto& row = e["A"][k];
        if (!row.is_array() || Index(row.size()) != d)
          throw ParseError(where + ".A[" + std::to_string(k) + "] must list " +
                           std::to_string(d) + " coefficients");
        for (Index c = 0; c < d; ++c)
          a(k, c) = number_at(row[c], where + ".A[" + std::to_string(k) + "]");
        b[k] = number_at(e["b"][k], where + ".b[" + std::to_string(k) + "]");
      }
      inst.push_back(Request(HPolytoped(std::move(a), std::move(b))));
    } else if (type == "func") {
      for (const auto& [key, value] : e.items()) {
        (void)value;
        if (key != "type" && key != "pieces")
          throw ParseError("unknown field '" + key + "' in " + where);
      }
      if (!e.contains("pieces")) missing(where + ".pieces");
      if (!e["pieces"].is_array() || e["pieces"].empty())
        throw ParseError(where + ".pieces must be a nonempty array");
      const Index rows = Index(e["pieces"].size());
      Matrix a(rows, d);
      Vector c(rows);
      for (Index k = 0; k < rows; ++k) {
        const auto& row = e["pieces"][k];
        if (!row.is_array() || Index(row.size()) != d + 1)
          throw ParseError(where + ".pieces[" + std::to_string(k) + "] must list " +
                           std::to_string(d) + " gradient coefficients plus an intercept");
        for (Index col = 0; col < d; ++col)
          a(k, col) = number_at(row[col], where + ".pieces[" + std::to_string(k) + "]");
        c[k] = number_at(row[d], where + ".pieces[" + std::to_string(k) + "]");
      }
      inst.push_back(Request(MaxAffined(std::move(a), std::move(c))));
    } else {
      throw ParseError(where + ".type must be 'body' or 'func'");
    }
    ++idx;
  }
  return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << to_json_string(inst);
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

}  // namespace chase
