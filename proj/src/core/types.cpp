#include "pvd/core/types.hpp"

namespace pvd {

const char* to_string(Category c) {
  switch (c) {
    case Category::MC: return "MC";
    case Category::LPC: return "LPC";
    case Category::IPCCandidate: return "IPCCandidate";
    case Category::IPC: return "IPC";
  }
  return "?";
}

const char* to_string(BoxState s) {
  switch (s) {
    case BoxState::Candidate: return "Candidate";
    case BoxState::ConfirmedIPC: return "ConfirmedIPC";
  }
  return "?";
}

Category category_from_string(const std::string& s) {
  if (s == "MC") return Category::MC;
  if (s == "LPC") return Category::LPC;
  if (s == "IPCCandidate") return Category::IPCCandidate;
  if (s == "IPC") return Category::IPC;
  throw DomainError("unknown category: " + s);
}

BoxState box_state_from_string(const std::string& s) {
  if (s == "Candidate") return BoxState::Candidate;
  if (s == "ConfirmedIPC") return BoxState::ConfirmedIPC;
  throw DomainError("unknown box state: " + s);
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0 && fy > 0)) throw DomainError("intrinsics: focal lengths must be positive");
  if (!(cx >= 0 && cx < width && cy >= 0 && cy < height))
    throw DomainError("intrinsics: principal point outside image");
}

void BoundingBox2D::validate() const {
  if (!(x_min < x_max && y_min < y_max)) throw DomainError("box2d: empty or inverted");
  if (!(score >= 0.0 && score <= 1.0)) throw DomainError("box2d: score outside [0,1]");
}

}  // namespace pvd
