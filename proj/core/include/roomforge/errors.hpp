#pragma once

#include <stdexcept>
#include <string>

namespace roomforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// config file or CLI arguments are malformed
struct ConfigError : Error {
  using Error::Error;
};

// sampling requested from a model that was neither trained nor loaded
struct UntrainedModelError : Error {
  using Error::Error;
};

// prompt mentions more objects than the scene type can hold
struct AnchorsExceedNodeBudget : Error {
  using Error::Error;
};

// external dataset root not present
struct MissingDatasetError : Error {
  using Error::Error;
};

// corpus too small for the requested operation (e.g. empty split)
struct InsufficientDataError : Error {
  using Error::Error;
};

// non-finite training loss
struct TrainingDivergedError : Error {
  using Error::Error;
};

// file-level parse failure with position info
struct FileFormatError : Error {
  FileFormatError(const std::string& path, long line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), path(path), line(line) {}
  std::string path;
  long line;
};

}  // namespace roomforge
