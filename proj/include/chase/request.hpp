#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "chase/common.hpp"
#include "chase/geometry.hpp"
#include "chase/norms.hpp"

namespace chase {

// One request served to the chaser: either a feasible bounded polytope the
// point must enter, or a nonnegative max-affine cost to pay where it stands.
class Request {
 public:
  // Body request: certification (feasible + bounded) happens here and the
  // certificate is kept for radius bounds and support checks.
  explicit Request(HPolytoped body)
      : body_(std::move(body)), cert_(certify(body_)), kind_(Kind::Body) {}
  Request(HPolytoped body, PolytopeCert cert)
      : body_(std::move(body)), cert_(std::move(cert)), kind_(Kind::Body) {}

  // Function request: nonnegativity is enforced structurally by requiring an
  // explicit zero piece.
  explicit Request(MaxAffined func) : func_(std::move(func)), kind_(Kind::Func) {
    if (!func_.has_zero_piece())
      throw ValidationError("function request must include the zero piece (a=0, c=0)");
  }

  bool is_body() const { return kind_ == Kind::Body; }
  bool is_func() const { return kind_ == Kind::Func; }
  const HPolytoped& body() const {
    if (!is_body()) throw Error("request is not a body");
    return body_;
  }
  const PolytopeCert& cert() const {
    if (!is_body()) throw Error("request is not a body");
    return cert_;
  }
  const MaxAffined& func() const {
    if (!is_func()) throw Error("request is not a function");
    return func_;
  }
  Index dim() const { return is_body() ? body_.dim() : func_.dim(); }

  // Distance from the origin to the farthest point of the request in the
  // ambient norm; zero for function requests (they are globally defined).
  double circumradius(NormTag tag) const {
    return is_body() ? circumradius_from_origin(cert_, tag) : 0.0;
  }

 private:
  enum class Kind { Body, Func };
  HPolytoped body_{};
  PolytopeCert cert_{};
  MaxAffined func_{};
  Kind kind_;
};

// A chasing instance: dimension, ambient norm, ordered requests, start at 0.
class Instance {
 public:
  Instance(Index dim, NormTag norm) : dim_(dim), norm_(norm) {
    if (dim < 1) throw ValidationError("instance dimension must be at least 1");
  }
  Instance(Index dim, NormTag norm, std::vector<Request> requests) : Instance(dim, norm) {
    for (auto& r : requests) push_back(std::move(r));
  }

  Index dim() const { return dim_; }
  NormTag norm() const { return norm_; }
  Index size() const { return static_cast<Index>(requests_.size()); }
  const Request& request(Index i) const { return requests_.at(static_cast<std::size_t>(i)); }
  const std::vector<Request>& requests() const { return requests_; }

  void push_back(Request r) {
    if (r.dim() != dim_)
      throw ValidationError("request dimension does not match instance dimension");
    requests_.push_back(std::move(r));
  }

  // Largest request circumradius among the first n requests (0 if none).
  double max_circumradius(Index n) const {
    double m = 0.0;
    for (Index i = 0; i < std::min(n, size()); ++i)
      m = std::max(m, request(i).circumradius(norm_));
    return m;
  }

 private:
  Index dim_;
  NormTag norm_;
  std::vector<Request> requests_;
};

}  // namespace chase
