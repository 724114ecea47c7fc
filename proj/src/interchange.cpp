// SPDX-License-Identifier: Apache-2.0
#include "geodiv/interchange.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "geodiv/error.hpp"
#include "geodiv/numeric.hpp"

namespace geodiv::interchange {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little, "sidecar I/O assumes a little-endian host");

std::filesystem::path sidecar_path(const std::filesystem::path& records, std::string_view rep_type) {
    auto p = records;
    p += ".";
    p += std::string(rep_type);
    p += ".f32";
    return p;
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated sidecar header: " + path);
    return v;
}

using SidecarLoader = std::function<const SidecarMatrix&(const std::string& rep_type)>;

std::vector<EmbeddingRecord> parse(std::string_view text, const std::string& name, DimensionRegistry& dims,
                                   const SidecarLoader& sidecar) {
    std::vector<EmbeddingRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        auto fail = [&](const std::string& field, const std::string& msg) -> IngestError {
            return IngestError(name, line_no, field, msg);
        };

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw fail("<record>", std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw fail("<record>", "record must be a JSON object");

        auto str_field = [&](const char* field) -> std::string {
            auto it = j.find(field);
            if (it == j.end()) throw fail(field, "missing field");
            if (!it->is_string()) throw fail(field, "expected a string");
            auto s = it->get<std::string>();
            if (s.empty()) throw fail(field, "empty value");
            return s;
        };

        EmbeddingRecord r;
        r.image_id = str_field("image_id");
        const auto dataset = str_field("dataset");
        try {
            r.dataset = parse_dataset(dataset);
        } catch (const DomainError&) {
            throw fail("dataset", "unknown dataset '" + dataset + "'");
        }
        r.source = str_field("source");
        r.topic = str_field("topic");
        r.rep_type = str_field("rep_type");

        if (auto it = j.find("country"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) throw fail("country", "expected a string or null");
            r.country = it->get<std::string>();
            if (r.country->empty()) throw fail("country", "empty value");
        }
        if (r.dataset == Dataset::low_resource && !r.country)
            throw fail("country", "low-resource records require a country");
        if (r.dataset == Dataset::high_resource && r.country)
            throw fail("country", "high-resource records must not carry a country");

        if (auto it = j.find("vector"); it != j.end()) {
            if (!it->is_array()) throw fail("vector", "expected an array of numbers");
            r.vector.reserve(it->size());
            for (const auto& x : *it) {
                if (!x.is_number()) throw fail("vector", "non-numeric element");
                r.vector.push_back(x.get<double>());
            }
        } else if (auto row = j.find("sidecar_row"); row != j.end()) {
            if (!row->is_number_unsigned()) throw fail("sidecar_row", "expected a non-negative integer");
            if (!sidecar) throw fail("sidecar_row", "sidecar rows need a file-backed source");
            const SidecarMatrix* m = nullptr;
            try {
                m = &sidecar(r.rep_type);
            } catch (const Error& e) {
                throw fail("sidecar_row", e.what());
            }
            const auto idx = row->get<std::size_t>();
            if (idx >= m->rows()) throw fail("sidecar_row", "row out of range");
            r.vector.assign(m->values.begin() + static_cast<std::ptrdiff_t>(idx * m->dim),
                            m->values.begin() + static_cast<std::ptrdiff_t>((idx + 1) * m->dim));
        } else {
            throw fail("vector", "missing field");
        }

        if (r.vector.empty()) throw fail("vector", "empty vector");
        for (double x : r.vector)
            if (!std::isfinite(x)) throw fail("vector", "non-finite value");
        if (numeric::norm(r.vector) == 0.0) throw fail("vector", "zero-norm vector");

        auto [it, inserted] = dims.try_emplace(r.rep_type, r.vector.size());
        if (!inserted && it->second != r.vector.size())
            throw fail("vector", "dimension " + std::to_string(r.vector.size()) + " does not match " +
                                     std::to_string(it->second) + " for rep_type '" + r.rep_type + "'");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

void write_sidecar(const std::filesystem::path& path, const SidecarMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write sidecar: " + path.string());
    out.write(kSidecarMagic, sizeof kSidecarMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rep_type.size()));
    out.write(m.rep_type.data(), static_cast<std::streamsize>(m.rep_type.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    out.write(reinterpret_cast<const char*>(m.values.data()),
              static_cast<std::streamsize>(m.values.size() * sizeof(float)));
}

SidecarMatrix read_sidecar(const std::filesystem::path& path) {
    const auto p = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sidecar: " + p);
    char magic[sizeof kSidecarMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSidecarMagic, sizeof magic) != 0)
        throw IoError("bad sidecar magic: " + p);
    SidecarMatrix m;
    const auto len = get<std::uint32_t>(in, p);
    m.rep_type.resize(len);
    if (!in.read(m.rep_type.data(), len)) throw IoError("truncated sidecar header: " + p);
    m.dim = get<std::uint32_t>(in, p);
    const auto rows = get<std::uint64_t>(in, p);
    m.values.resize(rows * m.dim);
    if (!in.read(reinterpret_cast<char*>(m.values.data()),
                 static_cast<std::streamsize>(m.values.size() * sizeof(float))))
        throw IoError("truncated sidecar body: " + p);
    return m;
}

std::vector<EmbeddingRecord> read_text(std::string_view text, const std::string& name, DimensionRegistry& dims) {
    return parse(text, name, dims, nullptr);
}

std::vector<EmbeddingRecord> read_file(const std::filesystem::path& path, DimensionRegistry& dims) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();

    std::map<std::string, SidecarMatrix, std::less<>> cache;
    SidecarLoader loader = [&](const std::string& rep) -> const SidecarMatrix& {
        auto it = cache.find(rep);
        if (it == cache.end()) {
            auto m = read_sidecar(sidecar_path(path, rep));
            if (m.rep_type != rep) throw IoError("sidecar rep_type mismatch for '" + rep + "'");
            it = cache.emplace(rep, std::move(m)).first;
        }
        return it->second;
    };
    return parse(text, path.string(), dims, loader);
}

namespace {

json record_json(const EmbeddingRecord& r) {
    for (double x : r.vector)
        if (!std::isfinite(x)) throw DomainError("record '" + r.image_id + "' has a non-finite value");
    json j;
    j["image_id"] = r.image_id;
    j["dataset"] = std::string(to_string(r.dataset));
    j["source"] = r.source;
    j["topic"] = r.topic;
    j["country"] = r.country ? json(*r.country) : json(nullptr);
    j["rep_type"] = r.rep_type;
    return j;
}

}  // namespace

std::string record_to_line(const EmbeddingRecord& r) {
    auto j = record_json(r);
    j["vector"] = r.vector;
    return j.dump();
}

void write_file(const std::filesystem::path& path, std::span<const EmbeddingRecord> records, bool packed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write interchange file: " + path.string());
    if (!packed) {
        for (const auto& r : records) out << record_to_line(r) << '\n';
        return;
    }
    std::map<std::string, SidecarMatrix, std::less<>> mats;
    for (const auto& r : records) {
        auto& m = mats[r.rep_type];
        if (m.rep_type.empty()) {
            m.rep_type = r.rep_type;
            m.dim = r.vector.size();
        }
        if (m.dim != r.vector.size()) throw DomainError("write_file: dimension mismatch within rep_type " + r.rep_type);
        auto j = record_json(r);
        j["sidecar_row"] = m.rows();
        for (double x : r.vector) m.values.push_back(static_cast<float>(x));
        out << j.dump() << '\n';
    }
    for (const auto& [rep, m] : mats) write_sidecar(sidecar_path(path, rep), m);
}

}  // namespace geodiv::interchange
