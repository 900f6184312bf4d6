#include "clockforge/csv.hpp"

#include "clockforge/error.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace clockforge::csv {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

Writer::Writer(std::filesystem::path path, std::span<const std::string> header)
    : path_(std::move(path)), columns_(header.size()) {
    // Fail early rather than after the simulation has run.
    std::ofstream probe(path_, std::ios::binary | std::ios::trunc);
    if (!probe) {
        throw IoError(fmt::format("cannot write '{}'", path_.string()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != 0) {
            buffer_ += ',';
        }
        buffer_ += header[i];
    }
    buffer_ += "\r\n";
}

Writer::~Writer() {
    try {
        close();
    } catch (...) { // NOLINT(bugprone-empty-catch): destructor must not throw
    }
}

void Writer::row(std::span<const std::optional<double>> values) {
    if (values.size() != columns_) {
        throw IoError(fmt::format("'{}': row has {} fields, header has {}", path_.string(),
                                  values.size(), columns_));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            buffer_ += ',';
        }
        if (values[i]) {
            buffer_ += format_real(*values[i]);
        }
    }
    buffer_ += "\r\n";
}

void Writer::row(std::span<const double> values) {
    std::vector<std::optional<double>> opt(values.begin(), values.end());
    row(opt);
}

void Writer::close() {
    if (closed_) {
        return;
    }
    closed_ = true;
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out) {
        throw IoError(fmt::format("failed writing '{}'", path_.string()));
    }
}

Table read(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot read '{}'", path.string()));
    }
    auto split = [](std::string line) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        return fields;
    };

    Table table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(fmt::format("'{}' is empty", path.string()));
    }
    table.header = split(line);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split(line);
        if (fields.size() != table.header.size()) {
            throw IoError(fmt::format("'{}' line {}: expected {} fields, got {}", path.string(),
                                      line_no, table.header.size(), fields.size()));
        }
        std::vector<std::optional<double>> row;
        row.reserve(fields.size());
        for (const auto &f : fields) {
            if (f.empty()) {
                row.emplace_back();
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw IoError(fmt::format("'{}' line {}: bad number '{}'", path.string(), line_no, f));
            }
            row.emplace_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace clockforge::csv
