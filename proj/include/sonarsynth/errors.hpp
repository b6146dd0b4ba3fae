#pragma once

#include <stdexcept>
#include <string>

namespace sonarsynth {

// Bad configs, manifests, arguments. CLI maps this to exit code 1;
// everything else thrown mid-run maps to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sonarsynth
