#pragma once

#include <stdexcept>
#include <string>

namespace roadeta {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph construction
struct DisconnectedRoute : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DuplicateEdge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownSegment : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerics
struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonScalarLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// simulation / serving
struct FieldExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoEdges : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CacheMiss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnresolvableRoute : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace roadeta
