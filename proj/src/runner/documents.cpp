#include "itsminer/runner/documents.hpp"

#include <algorithm>

#include "itsminer/errors.hpp"
#include "itsminer/rng.hpp"
#include "itsminer/textprep/textprep.hpp"

namespace itsminer::runner {

std::vector<Document> select_window(const corpus::Corpus& corpus, corpus::IssueType issue_type,
                                    std::int64_t horizon_days) {
    auto comments_by_issue = corpus.comments_by_issue();

    std::vector<Document> documents;
    for (const corpus::IssueRecord& issue : corpus.issues) {
        if (issue.issue_type != issue_type) continue;
        if (corpus::resolution_days(issue) <= horizon_days) continue;

        Document doc;
        doc.issue_id = issue.issue_id;
        doc.project_key = issue.project_key;
        doc.label = issue.label;
        doc.issue_type = issue.issue_type;
        doc.horizon_days = horizon_days;
        doc.text = textprep::apply_replacements(issue.description);

        auto it = comments_by_issue.find(issue.issue_id);
        if (it != comments_by_issue.end()) {
            std::vector<const corpus::CommentRecord*> visible;
            for (std::size_t idx : it->second) {
                const corpus::CommentRecord& comment = corpus.comments[idx];
                if (corpus::comment_offset_days(issue, comment) <= horizon_days)
                    visible.push_back(&comment);
            }
            std::sort(visible.begin(), visible.end(),
                      [](const corpus::CommentRecord* a, const corpus::CommentRecord* b) {
                          if (a->created_at != b->created_at) return a->created_at < b->created_at;
                          return a->comment_id < b->comment_id;
                      });
            for (const corpus::CommentRecord* comment : visible) {
                doc.text += " ";
                doc.text += textprep::apply_replacements(comment->description);
            }
        }
        documents.push_back(std::move(doc));
    }
    if (documents.empty())
        throw EmptyWindow(std::string("no ") + corpus::issue_type_name(issue_type) +
                          " issue resolved in more than " + std::to_string(horizon_days) + " days");
    return documents;
}

std::pair<std::vector<Document>, std::vector<Document>> split_train_test(
    const std::vector<Document>& documents, double train_fraction, std::uint64_t seed) {
    if (documents.size() < 4)
        throw TooFewDocuments("split needs at least 4 documents, got " +
                              std::to_string(documents.size()));
    std::vector<std::size_t> order(documents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    deterministic_shuffle(order, rng);

    std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(documents.size()));
    std::pair<std::vector<Document>, std::vector<Document>> out;
    out.first.reserve(n_train);
    out.second.reserve(documents.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? out.first : out.second).push_back(documents[order[i]]);
    return out;
}

namespace {

std::vector<Document> downsample_majority(const std::vector<Document>& documents,
                                          std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < documents.size(); ++i)
        (documents[i].label == corpus::SuccessLabel::Successful ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw SingleClassError("balancing needs both classes present");

    std::vector<std::size_t>& larger = pos.size() > neg.size() ? pos : neg;
    std::size_t target = std::min(pos.size(), neg.size());
    Rng rng(seed);
    deterministic_shuffle(larger, rng);
    larger.resize(target);

    std::vector<std::size_t> keep;
    keep.reserve(2 * target);
    keep.insert(keep.end(), pos.begin(), pos.end());
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());  // preserve incoming order

    std::vector<Document> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(documents[i]);
    return out;
}

}  // namespace

std::vector<Document> undersample(const std::vector<Document>& documents, std::uint64_t seed) {
    return downsample_majority(documents, seed);
}

std::vector<Document> balance_test(const std::vector<Document>& documents, std::uint64_t seed) {
    return downsample_majority(documents, seed);
}

}  // namespace itsminer::runner
