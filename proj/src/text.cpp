#include "kgrag/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "kgrag/errors.hpp"

namespace kgrag::text {

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-';
}

}  // namespace

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string normalize_ws(const std::string& s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&]() {
        // Hyphens are token characters only inside a token.
        std::size_t b = cur.find_first_not_of('-');
        if (b == std::string::npos) {
            cur.clear();
            return;
        }
        std::size_t e = cur.find_last_not_of('-');
        tokens.push_back(cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char c : s) {
        if (is_token_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> tokenize_filtered(const std::string& s,
                                           const std::set<std::string>& stopwords) {
    std::vector<std::string> out;
    for (auto& t : tokenize(s)) {
        if (stopwords.count(t) == 0) out.push_back(t);
    }
    return out;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens) {
    std::vector<std::string> out = tokens;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        out.push_back(tokens[i] + " " + tokens[i + 1]);
    }
    return out;
}

int count_phrase(const std::vector<std::string>& doc_tokens, const std::string& phrase) {
    std::vector<std::string> p = tokenize(phrase);
    if (p.empty() || doc_tokens.size() < p.size()) return 0;
    int count = 0;
    std::size_t i = 0;
    while (i + p.size() <= doc_tokens.size()) {
        bool match = true;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (doc_tokens[i + j] != p[j]) {
                match = false;
                break;
            }
        }
        if (match) {
            ++count;
            i += p.size();  // non-overlapping
        } else {
            ++i;
        }
    }
    return count;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open stopword file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(lowercase(line));
        if (!line.empty() && line[0] != '#') out.insert(line);
    }
    return out;
}

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
        "any", "are", "aren't", "as", "at", "be", "because", "been", "before", "being",
        "below", "between", "both", "but", "by", "can't", "cannot", "could", "couldn't",
        "did", "didn't", "do", "does", "doesn't", "doing", "don't", "down", "during",
        "each", "few", "for", "from", "further", "had", "hadn't", "has", "hasn't",
        "have", "haven't", "having", "he", "her", "here", "hers", "herself", "him",
        "himself", "his", "how", "i", "if", "in", "into", "is", "isn't", "it", "its",
        "itself", "me", "more", "most", "mustn't", "my", "myself", "no", "nor", "not",
        "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
        "ourselves", "out", "over", "own", "same", "shan't", "she", "should",
        "shouldn't", "so", "some", "such", "than", "that", "the", "their", "theirs",
        "them", "themselves", "then", "there", "these", "they", "this", "those",
        "through", "to", "too", "under", "until", "up", "very", "was", "wasn't", "we",
        "were", "weren't", "what", "when", "where", "which", "while", "who", "whom",
        "why", "with", "won't", "would", "wouldn't", "you", "your", "yours",
        "yourself", "yourselves"};
    return words;
}

std::vector<std::string> split_sentences(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cur.push_back(s[i]);
        if ((s[i] == '.' || s[i] == '!' || s[i] == '?') &&
            (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])) != 0)) {
            std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        }
    }
    std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

}  // namespace kgrag::text
