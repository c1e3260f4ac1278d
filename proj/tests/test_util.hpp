#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "repograph/json_io.hpp"

namespace repograph::testutil {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / (tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    void write(const std::string& rel, const std::string& content) const {
        write_text_file(path_ / rel, content);
    }
    void remove(const std::string& rel) const {
        std::error_code ec;
        std::filesystem::remove(path_ / rel, ec);
    }

private:
    std::filesystem::path path_;
};

} // namespace repograph::testutil
