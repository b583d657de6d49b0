#pragma once

#include <stdexcept>
#include <string>

namespace mms {

// Failure categories surfaced by the library. Each maps to a stable string
// used in CLI diagnostics and report JSON.
enum class ErrorKind {
  disconnected,        // graph (or required subgraph) is not connected
  scale_unresolvable,  // requested scale finer than the graph resolution
  no_convergence,      // iterative solver hit its iteration cap
  hypothesis_violated, // a paper-side hypothesis fails on the given data
  cover_gap,           // partition-of-unity bump sum vanished somewhere
  zero_warp_center,    // localization requested around a zero of w_d
  decay_hypothesis,    // warp measure does not decay linearly near its zeros
  too_large,           // construction exceeds the configured size cap
  config,              // malformed scenario/config input
  io,                  // file ingestion failure
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::scale_unresolvable: return "scale-unresolvable";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::hypothesis_violated: return "hypothesis-violated";
    case ErrorKind::cover_gap: return "cover-gap";
    case ErrorKind::zero_warp_center: return "zero-warp-center";
    case ErrorKind::decay_hypothesis: return "decay-hypothesis";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mms
