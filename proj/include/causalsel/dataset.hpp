#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace causalsel {

/// Column-named numeric matrix. All cells are finite; column names are
/// unique and nonempty. Rows are observations, columns are variables.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::MatrixXd values, std::vector<std::string> column_names);

    int n() const { return static_cast<int>(values_.rows()); }
    int p() const { return static_cast<int>(values_.cols()); }

    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& column_names() const { return names_; }

    bool has_column(const std::string& name) const;
    int column_index(const std::string& name) const;  // throws UnknownColumn
    Eigen::VectorXd column(int idx) const { return values_.col(idx); }
    Eigen::VectorXd column(const std::string& name) const;

    Dataset select_columns(const std::vector<std::string>& names) const;
    Dataset select_rows(const std::vector<int>& rows) const;
    Dataset drop_column(const std::string& name) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

/// Rescales every column to sample mean 0 and sample variance 1
/// (1/(n-1) normalization). Throws ConstantColumn on zero variance.
Dataset standardize(const Dataset& data);

/// CSV with a header row; every cell must parse as a finite number.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

}  // namespace causalsel
