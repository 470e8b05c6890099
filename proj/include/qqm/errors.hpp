#pragma once

#include <stdexcept>
#include <string>

namespace qqm {

/// A physical or structural constraint was violated. `tag` names the
/// equation and the failing condition, e.g. "L6:norm" or "S5:evanescent".
class ConstraintViolation : public std::invalid_argument {
 public:
  ConstraintViolation(std::string tag, const std::string& what)
      : std::invalid_argument(tag + ": " + what), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

/// Step scattering with total energy at or below the step height.
class EvanescentRegime : public ConstraintViolation {
 public:
  explicit EvanescentRegime(const std::string& what) : ConstraintViolation("S5:evanescent", what) {}
};

/// Transverse wave vector too large for a real normal momentum.
class NoPropagation : public ConstraintViolation {
 public:
  explicit NoPropagation(const std::string& what) : ConstraintViolation("S5:no-propagation", what) {}
};

}  // namespace qqm
