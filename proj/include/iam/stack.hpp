#pragma once

#include <cstddef>
#include <iterator>
#include <memory>
#include <vector>

namespace iam {

// Immutable cons list. Pushing and popping share the tail, so machine states
// can be copied freely.
template <class T>
class Stack {
  struct Cell;
  using Link = std::shared_ptr<const Cell>;

 public:
  class const_iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    const_iterator() = default;
    explicit const_iterator(const Cell* c) : cell_(c) {}
    reference operator*() const { return cell_->head; }
    pointer operator->() const { return &cell_->head; }
    const_iterator& operator++() {
      cell_ = cell_->tail.get();
      return *this;
    }
    const_iterator operator++(int) {
      auto old = *this;
      ++*this;
      return old;
    }
    bool operator==(const const_iterator& o) const { return cell_ == o.cell_; }

   private:
    const Cell* cell_ = nullptr;
  };

  Stack() = default;

  static Stack from_vector(const std::vector<T>& top_first) {
    Stack s;
    for (auto it = top_first.rbegin(); it != top_first.rend(); ++it) s = s.push(*it);
    return s;
  }

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  const T& top() const { return top_->head; }

  Stack push(T value) const {
    return Stack(std::make_shared<const Cell>(Cell{std::move(value), top_}), size_ + 1);
  }
  Stack pop() const { return Stack(top_->tail, size_ - 1); }

  Stack drop(std::size_t n) const {
    Stack s = *this;
    while (n-- > 0 && !s.empty()) s = s.pop();
    return s;
  }

  Stack take(std::size_t n) const {
    std::vector<T> v;
    for (const auto& x : *this) {
      if (v.size() == n) break;
      v.push_back(x);
    }
    return from_vector(v);
  }

  // The last (bottom-most) element.
  const T& bottom() const {
    const Cell* c = top_.get();
    while (c->tail) c = c->tail.get();
    return c->head;
  }

  Stack without_bottom() const {
    std::vector<T> v = to_vector();
    v.pop_back();
    return from_vector(v);
  }

  std::vector<T> to_vector() const { return std::vector<T>(begin(), end()); }

  // front · back
  static Stack concat(const Stack& front, const Stack& back) {
    if (front.empty()) return back;
    if (back.empty()) return front;
    std::vector<T> v = front.to_vector();
    Stack s = back;
    for (auto it = v.rbegin(); it != v.rend(); ++it) s = s.push(*it);
    return s;
  }

  const_iterator begin() const { return const_iterator(top_.get()); }
  const_iterator end() const { return const_iterator(); }

  friend bool operator==(const Stack& a, const Stack& b) {
    if (a.size_ != b.size_) return false;
    const Cell* x = a.top_.get();
    const Cell* y = b.top_.get();
    while (x != y) {
      if (!(x->head == y->head)) return false;
      x = x->tail.get();
      y = y->tail.get();
    }
    return true;
  }

 private:
  Stack(Link top, std::size_t size) : top_(std::move(top)), size_(size) {}

  Link top_;
  std::size_t size_ = 0;
};

template <class T>
struct Stack<T>::Cell {
  T head;
  Link tail;
};

}  // namespace iam
