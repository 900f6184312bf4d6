// CSV output (RFC 4180 line conventions, '.' decimal separator, 17 significant
// digits so every double survives a write/read round trip).
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace clockforge::csv {

/// "%.17g" rendering of a double.
[[nodiscard]] std::string format_real(double value);

/// Buffers rows in memory and writes the file on close() (or destruction).
class Writer {
  public:
    /// Throws IoError if the file cannot be created.
    Writer(std::filesystem::path path, std::span<const std::string> header);
    ~Writer();
    Writer(const Writer &) = delete;
    Writer &operator=(const Writer &) = delete;

    /// Empty optionals are written as empty fields.
    void row(std::span<const std::optional<double>> values);
    void row(std::span<const double> values);

    /// Flushes to disk. Throws IoError on failure.
    void close();

  private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t columns_;
    bool closed_ = false;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;
};

/// Reads a numeric CSV written by Writer. Throws IoError / ConfigError.
[[nodiscard]] Table read(const std::filesystem::path &path);

} // namespace clockforge::csv
