#include "blowfly/output.hpp"

#include "blowfly/errors.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>

namespace blowfly {

namespace fs = std::filesystem;

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void CsvRow::sep() {
    if (!empty_) line_ += ',';
    empty_ = false;
}

CsvRow& CsvRow::operator<<(double v) {
    sep();
    line_ += format_number(v);
    return *this;
}

CsvRow& CsvRow::operator<<(int v) {
    sep();
    line_ += std::to_string(v);
    return *this;
}

CsvRow& CsvRow::operator<<(long v) {
    sep();
    line_ += std::to_string(v);
    return *this;
}

CsvRow& CsvRow::operator<<(const std::string& v) {
    sep();
    line_ += v;
    return *this;
}

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw ConfigError("workbench-cli", "output", "cannot create " + root_.string() + ": " + ec.message());
    const fs::path probe = root_ / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("workbench-cli", "output", "directory " + root_.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

void OutputDir::write(const std::string& name, const std::string& content) {
    const fs::path path = root_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("workbench-cli", "output", "failed to write " + path.string());
    if (std::find(artifacts_.begin(), artifacts_.end(), name) == artifacts_.end()) artifacts_.push_back(name);
}

void OutputDir::write_manifest(const std::map<std::string, std::string>& config_echo) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream os;
    os << "# generated " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << "\n";
    os << "[config]\n";
    for (const auto& [key, value] : config_echo) os << key << " = " << value << "\n";
    os << "[artifacts]\n";
    for (const auto& name : artifacts_) os << name << "\n";
    os << "manifest.txt\n";
    std::ofstream out(root_ / "manifest.txt", std::ios::binary);
    out << os.str();
}

}  // namespace blowfly
