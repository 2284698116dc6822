#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hawkespop {

// Shortest round-trip text; fixed notation for 1e-3 <= |x| < 1e6 (and 0),
// scientific otherwise. Locale independent.
[[nodiscard]] std::string format_number(double x);

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream &out) : out_(out) {}

    void header(std::initializer_list<std::string_view> cols);
    void row(const std::vector<std::string> &fields);

  private:
    std::ostream &out_;
    std::size_t width_ = 0;
};

} // namespace hawkespop
