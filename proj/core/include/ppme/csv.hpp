#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ppme {

/// RFC-4180 style writer: comma separated, CRLF-free ("\n") records, fields
/// quoted when they contain a comma, quote or newline. Doubles are written
/// with 17 significant digits and '.' as decimal separator regardless of the
/// global locale.
class CsvWriter {
 public:
  using Field = std::variant<double, long long, std::string>;

  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);
  void header(const std::vector<std::string>& names);
  void row(std::initializer_list<double> values);
  void row(const std::vector<Field>& fields);

 private:
  void write_field(const Field& f);
  std::ostream& out_;
};

std::string format_double(double value);
std::string quote_csv(std::string_view text);

}  // namespace ppme
