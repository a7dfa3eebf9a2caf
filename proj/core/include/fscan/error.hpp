#pragma once

#include <stdexcept>
#include <string>

namespace fscan {

/// Bad input: malformed files, duplicate ids, out-of-range parameters.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The data admit no finite index value (e.g. zero within-group dispersion
/// for the functional ANOVA statistic).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fscan
