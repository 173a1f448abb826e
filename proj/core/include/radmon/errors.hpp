#pragma once

#include <stdexcept>
#include <string>

namespace radmon {

enum class Err {
  // scene / simulation
  RangeOutOfBound,
  VelocityAmbiguous,
  UnknownActivity,
  // signal processing
  ShapeMismatch,
  ConfigMismatch,
  TooFewChirps,
  TooShort,
  // presence detection
  NotCalibrated,
  TooFewFrames,
  // training data
  BadLabel,
  EmptyDataset,
  ClassMissing,
  // status routing / reports
  MissingDecision,
  UnsortedEvents,
  // wire protocol
  BadMagic,
  UnknownType,
  LengthMismatch,
  UnsupportedVersion,
  // generic
  BadConfig,
  BadFile,
};

const char* err_name(Err e);

// All contract violations surface as radmon::Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what);
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void raise(Err code, const std::string& what);

}  // namespace radmon
