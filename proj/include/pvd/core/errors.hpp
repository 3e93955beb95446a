#pragma once

#include <stdexcept>
#include <string>

namespace pvd {

// Base class for all recoverable library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Point at or behind the camera plane.
struct DepthNonPositive : Error {
  using Error::Error;
};

// Image too small for the requested pyramid depth.
struct TooSmall : Error {
  using Error::Error;
};

// Render time outside the trajectory span.
struct TimeOutOfRange : Error {
  using Error::Error;
};

// Scene generator could not place cars without overlap.
struct InfeasiblePlacement : Error {
  using Error::Error;
};

// No pixel contributes to a masked loss.
struct EmptyMask : Error {
  using Error::Error;
};

// Too few background pixels for ego-flow estimation.
struct InsufficientBackground : Error {
  using Error::Error;
};

// Box contains no valid flow pixel.
struct EmptyBox : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Under-constrained or ill-conditioned solve.
struct Degenerate : Error {
  using Error::Error;
};

// Iterative solver kept increasing the error.
struct Diverged : Error {
  using Error::Error;
};

// Triangulation rays are (near-)parallel.
struct DegenerateBaseline : Error {
  using Error::Error;
};

// Triangulated point behind one of the cameras.
struct NegativeDepth : Error {
  using Error::Error;
};

// Triangulated point reprojects too far from an observation.
struct TriangulationRejected : Error {
  using Error::Error;
};

// No pose hypothesis reached the inlier floor.
struct RelocalizationFailed : Error {
  using Error::Error;
};

}  // namespace pvd
