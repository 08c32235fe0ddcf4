#include "nasal/manifest.hpp"

#include "nasal/csv.hpp"
#include "nasal/errors.hpp"

#include <map>

namespace nasal {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    auto in = open_in(path);
    std::vector<ManifestEntry> entries;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (!fields.empty() && fields[0] == "sample_id") continue;  // header row
        }
        if (fields.size() != 6)
            throw ParseError("manifest row needs 6 columns in " + path, line_no);
        ManifestEntry e;
        e.sample_id = fields[0];
        e.path = fields[1];
        e.format = cloud_format_from_string(fields[2]);
        e.subject = fields[3];
        e.expression = fields[4];
        e.session = fields[5];
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw DegenerateInputError("empty manifest: " + path);
    return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    auto out = open_out(path);
    out << "sample_id,path,format,subject,expression,session\n";
    for (const auto& e : entries)
        out << e.sample_id << ',' << e.path << ',' << to_string(e.format) << ',' << e.subject
            << ',' << e.expression << ',' << e.session << '\n';
}

std::vector<int> subject_labels(const std::vector<ManifestEntry>& entries) {
    std::map<std::string, int> ids;
    std::vector<int> labels;
    labels.reserve(entries.size());
    for (const auto& e : entries) {
        auto it = ids.find(e.subject);
        if (it == ids.end()) it = ids.emplace(e.subject, static_cast<int>(ids.size())).first;
        labels.push_back(it->second);
    }
    return labels;
}

}  // namespace nasal
