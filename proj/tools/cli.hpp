#pragma once

// The seqcert command-line surface. Commands write to caller-supplied
// streams so they can be driven from tests.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqcert/core.hpp"

namespace seqcert::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kAssertion = 3 };

inline constexpr const char* kSchemaVersion = "1";

/// Malformed bit-stream input; the message names the line.
class InputError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// %.17g, with "inf", "-inf" and an empty field for NaN.
std::string format_double(double x);

/// Whitespace-separated 0/1 tokens.
TrialSequence parse_trials(std::istream& in);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& out) const;
};

struct FigureOptions {
  std::optional<Count> n;
  std::optional<double> theta;
  std::optional<double> a;
  std::optional<double> phi;
};

/// Plot data for figure `id` in 1..6.
Table figure_table(int id, const FigureOptions& options = {});

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqcert::cli
