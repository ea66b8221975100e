#include "gustnav/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gustnav/errors.hpp"

namespace gustnav {

namespace {

constexpr char kMagic[5] = {'G', 'N', 'A', 'V', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

struct Reader {
    const std::string& buf;
    const std::string& path;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size())
            throw ParseError(path + ": truncated checkpoint reading " + what + " at offset " +
                             std::to_string(pos) + ": need " + std::to_string(n) + " bytes, have " +
                             std::to_string(buf.size() - pos));
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, buf.data() + pos, 4);
        pos += 4;
        return v;
    }
    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    void f64s(double* dst, std::size_t n, const char* what) {
        need(n * 8, what);
        std::memcpy(dst, buf.data() + pos, n * 8);
        pos += n * 8;
    }
};

}  // namespace

void Checkpoint::add(const std::string& name, Tensor t) {
    names_.push_back(name);
    tensors_.push_back(std::move(t));
}

void Checkpoint::add_scalar(const std::string& name, double v) {
    add(name, Tensor{{1}, {v}});
}

void Checkpoint::add_u64(const std::string& name, const std::vector<std::uint64_t>& words) {
    Tensor t;
    t.shape = {words.size()};
    t.data.reserve(words.size());
    for (std::uint64_t w : words) t.data.push_back(std::bit_cast<double>(w));
    add(name, std::move(t));
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& n : names_)
        if (n == name) return true;
    return false;
}

const Tensor& Checkpoint::get(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return tensors_[i];
    throw ParseError("checkpoint: missing record '" + name + "'");
}

double Checkpoint::get_scalar(const std::string& name) const {
    const Tensor& t = get(name);
    if (t.data.size() != 1) throw ParseError("checkpoint: '" + name + "' is not a scalar");
    return t.data[0];
}

std::vector<std::uint64_t> Checkpoint::get_u64(const std::string& name) const {
    const Tensor& t = get(name);
    std::vector<std::uint64_t> words;
    words.reserve(t.data.size());
    for (double d : t.data) words.push_back(std::bit_cast<std::uint64_t>(d));
    return words;
}

void Checkpoint::save(const std::string& path) const {
    std::string out;
    out.append(kMagic, 5);
    put_u32(out, static_cast<std::uint32_t>(names_.size()));
    for (std::size_t i = 0; i < names_.size(); ++i) {
        const Tensor& t = tensors_[i];
        put_u32(out, static_cast<std::uint32_t>(names_[i].size()));
        out.append(names_[i]);
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
        const std::size_t bytes = t.data.size() * 8;
        const std::size_t off = out.size();
        out.resize(off + bytes);
        std::memcpy(out.data() + off, t.data.data(), bytes);
    }
    put_u32(out, static_cast<std::uint32_t>(config_json_.size()));
    out.append(config_json_);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError(path + ": cannot open for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ParseError(path + ": write failed");
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError(path + ": cannot open for reading");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf, path};
    const std::string magic = r.bytes(5, "magic");
    if (std::memcmp(magic.data(), kMagic, 5) != 0)
        throw ParseError(path + ": bad magic (expected GNAV1)");

    Checkpoint ckpt;
    const std::uint32_t count = r.u32("record count");
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = r.u32("name length");
        const std::string name = r.bytes(name_len, "record name");
        const std::uint32_t rank = r.u32("rank");
        Tensor t;
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            const std::uint32_t dim = r.u32("dimension");
            t.shape.push_back(dim);
            n *= dim;
        }
        t.data.resize(n);
        r.f64s(t.data.data(), n, name.c_str());
        ckpt.add(name, std::move(t));
    }
    const std::uint32_t cfg_len = r.u32("config length");
    ckpt.config_json_ = r.bytes(cfg_len, "config echo");
    if (r.pos != buf.size())
        throw ParseError(path + ": trailing bytes after config echo (expected length " +
                         std::to_string(r.pos) + ", actual " + std::to_string(buf.size()) + ")");
    return ckpt;
}

}  // namespace gustnav
