#pragma once

#include <stdexcept>
#include <string>

namespace mfpt {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent configuration input (bad JSON, unknown keys,
/// out-of-range material parameters, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Defective geometry input (open mesh, inverted orientation, degenerate
/// triangle, non-unit normal, ...).
struct GeometryError : Error {
  using Error::Error;
};

/// Field evaluation problems: missing ambient extension, closed-form
/// derivatives inconsistent with finite differences, ...
struct FieldError : Error {
  using Error::Error;
};

/// Input violates a mathematical solvability requirement (e.g. a vector
/// field with a nontrivial rotational part fed to the pressure recovery).
struct IllPosedError : Error {
  using Error::Error;
};

/// Velocity/pressure data violate the kinematic or boundary restrictions of
/// the flow model; the message names the violated condition.
struct RestrictionError : Error {
  using Error::Error;
};

/// The interface balance cannot be inverted because the mean curvature
/// vanishes (flat interface): use the kinematic condition instead.
struct FlatInterfaceError : Error {
  using Error::Error;
};

/// Time integration failed (negative density, CFL violation, ...).
struct NumericalAbortError : Error {
  using Error::Error;
};

}  // namespace mfpt
