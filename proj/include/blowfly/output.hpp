#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace blowfly {

/// Every float written by the workbench goes through here (12 significant digits).
std::string format_number(double v);

/// Comma-joined row; doubles are formatted with format_number.
class CsvRow {
public:
    CsvRow& operator<<(double v);
    CsvRow& operator<<(int v);
    CsvRow& operator<<(long v);
    CsvRow& operator<<(const std::string& v);
    CsvRow& operator<<(const char* v) { return *this << std::string(v); }

    std::string str() const { return line_ + "\n"; }

private:
    void sep();
    std::string line_;
    bool empty_ = true;
};

/// Output directory of one run. Creation and a write probe happen in the
/// constructor so an unwritable directory fails before any computation.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    const std::vector<std::string>& artifacts() const { return artifacts_; }

    void write(const std::string& name, const std::string& content);

    /// manifest.txt: a timestamp header, the echoed config and the artifact list.
    void write_manifest(const std::map<std::string, std::string>& config_echo);

private:
    std::filesystem::path root_;
    std::vector<std::string> artifacts_;
};

}  // namespace blowfly
