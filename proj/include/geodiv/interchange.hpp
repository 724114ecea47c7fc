// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geodiv/types.hpp"

namespace geodiv::interchange {

// Line-delimited JSON, one record per line:
//
//   {"image_id": "...", "dataset": "low_resource", "source": "survey-a",
//    "topic": "stove", "country": "japan", "rep_type": "clip",
//    "vector": [0.12, -0.5, ...]}
//
// Bulk corpora may replace "vector" with "sidecar_row": <n>, indexing row n of
// the packed float32 sidecar "<file>.<rep_type>.f32" next to the record file.

/// Packed sidecar header: magic "GEODVEC1", u32 rep_type byte length, the
/// rep_type bytes, u32 dimension, u64 row count. Rows follow as little-endian
/// IEEE-754 float32. All integers little-endian.
inline constexpr char kSidecarMagic[8] = {'G', 'E', 'O', 'D', 'V', 'E', 'C', '1'};

struct SidecarMatrix {
    std::string rep_type;
    std::size_t dim = 0;
    std::vector<float> values;  // row-major, rows * dim

    std::size_t rows() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
};

std::filesystem::path sidecar_path(const std::filesystem::path& records, std::string_view rep_type);

void write_sidecar(const std::filesystem::path& path, const SidecarMatrix& m);
SidecarMatrix read_sidecar(const std::filesystem::path& path);

/// Tracks the vector dimension per rep_type across every file of one ingest.
using DimensionRegistry = std::map<std::string, std::size_t, std::less<>>;

/// Parses one interchange file. Validates field presence and types,
/// finiteness, nonzero norm, dataset/country coupling and per-rep dimension.
/// Throws IngestError naming file, line and field.
std::vector<EmbeddingRecord> read_file(const std::filesystem::path& path, DimensionRegistry& dims);

/// Parses records from an in-memory buffer; `name` is used in error messages.
std::vector<EmbeddingRecord> read_text(std::string_view text, const std::string& name, DimensionRegistry& dims);

std::string record_to_line(const EmbeddingRecord& r);

/// Writes records in the given order. With `packed`, vectors go to one float32
/// sidecar per rep_type and lines carry "sidecar_row".
void write_file(const std::filesystem::path& path, std::span<const EmbeddingRecord> records, bool packed = false);

}  // namespace geodiv::interchange
