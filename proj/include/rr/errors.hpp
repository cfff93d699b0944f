#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rr {

// Raised by tape sources when a request runs past the end of the tape.
// `needed` is the number of additional bits the pending request requires.
class TapeExhausted : public std::runtime_error {
 public:
  explicit TapeExhausted(unsigned needed)
      : std::runtime_error("tape exhausted"), needed_(needed) {}
  unsigned needed() const { return needed_; }

 private:
  unsigned needed_;
};

class InvalidRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BatchOverflow : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TableTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidDepth : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CorruptTree : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DenominatorExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateBins : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParameterTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rr
