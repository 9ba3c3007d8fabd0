#include "ppme/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace ppme {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string quote_csv(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) {
    if (!first) out_ << ',';
    out_ << quote_csv(n);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_csv(names[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out_ << ',';
    out_ << format_double(v);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Field>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    write_field(fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::write_field(const Field& f) {
  if (const auto* d = std::get_if<double>(&f)) {
    out_ << format_double(*d);
  } else if (const auto* i = std::get_if<long long>(&f)) {
    out_ << *i;
  } else {
    out_ << quote_csv(std::get<std::string>(f));
  }
}

}  // namespace ppme
