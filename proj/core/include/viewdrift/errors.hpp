#pragma once
#include <stdexcept>
#include <string>

namespace viewdrift {

// Error taxonomy used across the library. Precondition violations raise
// InvalidInput; the other kinds name the geometric or numeric situation.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidInput : Error { using Error::Error; };
struct DegenerateGeometry : Error { using Error::Error; };
struct NotVisible : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct DegenerateGroup : Error { using Error::Error; };
struct UndefinedMetric : Error { using Error::Error; };

}  // namespace viewdrift
