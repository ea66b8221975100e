#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gustnav/tensor.hpp"

namespace gustnav {

// Binary checkpoint container: "GNAV1" magic, u32 record count, then per
// record a u32 name length, the UTF-8 name, u32 rank, u32 dims and raw
// little-endian f64 values; a u32-length-prefixed config JSON echo closes
// the file. Records keep insertion order so save -> load -> save is
// byte-identical.
class Checkpoint {
public:
    void add(const std::string& name, Tensor t);
    void add_scalar(const std::string& name, double v);
    void add_u64(const std::string& name, const std::vector<std::uint64_t>& words);

    bool has(const std::string& name) const;
    const Tensor& get(const std::string& name) const;  // ParseError if missing
    double get_scalar(const std::string& name) const;
    std::vector<std::uint64_t> get_u64(const std::string& name) const;

    const std::string& config_json() const { return config_json_; }
    void set_config_json(std::string j) { config_json_ = std::move(j); }

    std::size_t record_count() const { return names_.size(); }
    const std::string& record_name(std::size_t i) const { return names_[i]; }

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::string config_json_;
};

}  // namespace gustnav
