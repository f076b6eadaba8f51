#include "causalsel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "causalsel/errors.hpp"

namespace causalsel {

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> column_names)
    : values_(std::move(values)), names_(std::move(column_names)) {
    if (static_cast<int>(names_.size()) != values_.cols())
        throw InvalidArgument("column name count does not match matrix width");
    if (values_.rows() < 1 || values_.cols() < 1)
        throw InvalidArgument("dataset must have at least one row and one column");
    std::set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw InvalidArgument("empty column name");
        if (!seen.insert(name).second) throw DuplicateColumn(name);
    }
    if (!values_.allFinite())
        throw InvalidArgument("dataset contains non-finite values");
}

bool Dataset::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

int Dataset::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw UnknownColumn(name);
    return static_cast<int>(it - names_.begin());
}

Eigen::VectorXd Dataset::column(const std::string& name) const {
    return values_.col(column_index(name));
}

Dataset Dataset::select_columns(const std::vector<std::string>& names) const {
    Eigen::MatrixXd out(values_.rows(), names.size());
    for (size_t j = 0; j < names.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = values_.col(column_index(names[j]));
    return Dataset(std::move(out), names);
}

Dataset Dataset::select_rows(const std::vector<int>& rows) const {
    Eigen::MatrixXd out(rows.size(), values_.cols());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= n()) throw InvalidArgument("row index out of range");
        out.row(static_cast<Eigen::Index>(i)) = values_.row(rows[i]);
    }
    return Dataset(std::move(out), names_);
}

Dataset Dataset::drop_column(const std::string& name) const {
    std::vector<std::string> keep;
    keep.reserve(names_.size());
    for (const auto& c : names_)
        if (c != name) keep.push_back(c);
    if (keep.size() == names_.size()) throw UnknownColumn(name);
    return select_columns(keep);
}

Dataset standardize(const Dataset& data) {
    const int n = data.n();
    if (n < 2) throw InsufficientSamples("standardize needs at least two rows");
    Eigen::MatrixXd out = data.values();
    for (int j = 0; j < data.p(); ++j) {
        const double mean = out.col(j).mean();
        out.col(j).array() -= mean;
        const double var = out.col(j).squaredNorm() / (n - 1);
        if (var <= 0.0) throw ConstantColumn(data.column_names()[j]);
        out.col(j) /= std::sqrt(var);
    }
    return Dataset(std::move(out), data.column_names());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file: " + path);
    const std::vector<std::string> header = split_csv_line(line);
    std::set<std::string> seen;
    for (const auto& name : header) {
        if (name.empty()) throw ParseError(0, name, "empty header field");
        if (!seen.insert(name).second) throw DuplicateColumn(name);
    }

    std::vector<std::vector<double>> rows;
    int row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(row_no, header[std::min(fields.size(), header.size() - 1)],
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (size_t j = 0; j < fields.size(); ++j) {
            const std::string& cell = fields[j];
            if (cell.empty()) throw ParseError(row_no, header[j], "missing value");
            size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw ParseError(row_no, header[j], "not a number: \"" + cell + "\"");
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size() || !std::isfinite(v))
                throw ParseError(row_no, header[j], "not a finite number: \"" + cell + "\"");
            row[j] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("no data rows in " + path);

    Eigen::MatrixXd values(rows.size(), header.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < header.size(); ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return Dataset(std::move(values), header);
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (int j = 0; j < data.p(); ++j) {
        if (j) out << ',';
        out << data.column_names()[j];
    }
    out << '\n';
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) {
            if (j) out << ',';
            out << data.values()(i, j);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace causalsel
