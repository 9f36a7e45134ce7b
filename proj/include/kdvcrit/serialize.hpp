#pragma once

// JSON and CSV renderings of the library's records. JSON numbers use
// nlohmann's shortest round-trip form; CSV numbers use %.17g.

#include <string>
#include <vector>

#include "json.hpp"
#include "kdvcrit/arith.hpp"
#include "kdvcrit/basym.hpp"
#include "kdvcrit/modes.hpp"
#include "kdvcrit/roots.hpp"
#include "kdvcrit/sim.hpp"

namespace kdvcrit::io {

using Json = nlohmann::ordered_json;

Json to_json(Complex z);  // [re, im]
Json to_json(const arith::Pair& p);
Json to_json(const arith::CriticalIndex& ci);
Json to_json(const modes::ModeSpec& m);
Json to_json(const modes::TrappingDirection& td);
Json to_json(const roots::RootTriple& rt);
Json to_json(const basym::CoefTable& c);
Json to_json(const basym::BScan& scan);  // fit summary only
Json to_json(const sim::TrapResult& t);

std::string_view to_string(modes::ModeKind k);

/// %.17g
std::string num(double v);

/// Writes text with LF line endings; throws Error on failure.
void write_file(const std::string& path, const std::string& text);

/// Comma-separated rows with a header line.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  const std::string& str() const { return text_; }

private:
  std::size_t width_;
  std::string text_;
};

}  // namespace kdvcrit::io
