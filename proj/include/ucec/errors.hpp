#pragma once

#include <stdexcept>
#include <string>

namespace ucec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SizeOverflow : public Error {
 public:
  using Error::Error;
};

class BlockSizeMismatch : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration rejected before any work is done.
class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace ucec
