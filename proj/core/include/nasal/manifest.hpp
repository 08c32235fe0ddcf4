#pragma once

#include "nasal/cloud_io.hpp"

#include <string>
#include <vector>

namespace nasal {

/// One dataset sample. The CSV columns are
/// sample_id,path,format,subject,expression,session.
struct ManifestEntry {
    std::string sample_id;
    std::string path;
    CloudFormat format = CloudFormat::xyz;
    std::string subject;
    std::string expression;  // "neutral" or an expression label
    std::string session;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);

/// Stable subject-label mapping (first appearance order).
std::vector<int> subject_labels(const std::vector<ManifestEntry>& entries);

}  // namespace nasal
