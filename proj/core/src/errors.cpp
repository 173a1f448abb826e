#include "radmon/errors.hpp"

namespace radmon {

const char* err_name(Err e) {
  switch (e) {
    case Err::RangeOutOfBound: return "RangeOutOfBound";
    case Err::VelocityAmbiguous: return "VelocityAmbiguous";
    case Err::UnknownActivity: return "UnknownActivity";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::ConfigMismatch: return "ConfigMismatch";
    case Err::TooFewChirps: return "TooFewChirps";
    case Err::TooShort: return "TooShort";
    case Err::NotCalibrated: return "NotCalibrated";
    case Err::TooFewFrames: return "TooFewFrames";
    case Err::BadLabel: return "BadLabel";
    case Err::EmptyDataset: return "EmptyDataset";
    case Err::ClassMissing: return "ClassMissing";
    case Err::MissingDecision: return "MissingDecision";
    case Err::UnsortedEvents: return "UnsortedEvents";
    case Err::BadMagic: return "BadMagic";
    case Err::UnknownType: return "UnknownType";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::UnsupportedVersion: return "UnsupportedVersion";
    case Err::BadConfig: return "BadConfig";
    case Err::BadFile: return "BadFile";
  }
  return "Unknown";
}

Error::Error(Err code, const std::string& what)
    : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

void raise(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace radmon
