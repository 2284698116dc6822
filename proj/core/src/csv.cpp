#include "hawkespop/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hawkespop {

std::string format_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    const double a = std::abs(x);
    const auto fmt = (a == 0.0 || (a >= 1e-3 && a < 1e6))
                         ? std::chars_format::fixed
                         : std::chars_format::scientific;
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, fmt);
    if (ec != std::errc{})
        throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), end);
}

namespace {

std::string quote(std::string_view f) {
    if (f.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(f);
    std::string q = "\"";
    for (char c : f) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

} // namespace

void CsvWriter::header(std::initializer_list<std::string_view> cols) {
    width_ = cols.size();
    bool first = true;
    for (auto c : cols) {
        if (!first)
            out_ << ',';
        out_ << quote(c);
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string> &fields) {
    if (width_ != 0 && fields.size() != width_)
        throw std::logic_error("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << quote(fields[i]);
    }
    out_ << '\n';
}

} // namespace hawkespop
