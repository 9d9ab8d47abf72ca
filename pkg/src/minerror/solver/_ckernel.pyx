# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled union-find unifier; same interface and results as ``_pykernel``."""

from libcpp.vector cimport vector


cdef class TermGraph:
    cdef public list kind
    cdef public list kids
    cdef vector[int] _kind
    cdef vector[int] _start
    cdef vector[int] _kid
    cdef vector[int] parent
    cdef vector[int] struct_
    cdef vector[int] stamp
    cdef int epoch

    def __init__(self):
        self.kind = []
        self.kids = []
        self._start.push_back(0)
        self.epoch = 0

    def add_node(self, int kind, children):
        cdef tuple ch = tuple(children)
        self.kind.append(kind)
        self.kids.append(ch)
        self._kind.push_back(kind)
        for c in ch:
            self._kid.push_back(c)
        self._start.push_back(self._kid.size())
        return len(self.kind) - 1

    def __len__(self):
        return len(self.kind)

    cdef inline int find(self, int x):
        cdef int root = x
        cdef int nxt
        while self.parent[root] >= 0:
            root = self.parent[root]
        while x != root:
            nxt = self.parent[x]
            self.parent[x] = root
            x = nxt
        return root

    cdef inline int struct_of(self, int r):
        if self.struct_[r] >= 0:
            return self.struct_[r]
        return r if self._kind[r] != 0 else -1

    cdef bint occurs(self, int var_root, int node, vector[int]& stack):
        cdef int r, s, k
        self.epoch += 1
        stack.clear()
        stack.push_back(node)
        while stack.size():
            r = self.find(stack.back())
            stack.pop_back()
            if r == var_root:
                return True
            if self.stamp[r] == self.epoch:
                continue
            self.stamp[r] = self.epoch
            s = self.struct_of(r)
            if s >= 0:
                for k in range(self._start[s], self._start[s + 1]):
                    stack.push_back(self._kid[k])
        return False

    cdef int run(self, pairs) except -2:
        cdef int n = self._kind.size()
        cdef int i, m, a, b, ra, rb, sa, sb, k, na
        cdef vector[int] todo
        cdef vector[int] stack
        cdef list ps = list(pairs)
        self.parent.assign(n, -1)
        self.struct_.assign(n, -1)
        self.stamp.assign(n, 0)
        self.epoch = 0
        m = len(ps)
        for i in range(0, m, 2):
            todo.clear()
            todo.push_back(ps[i])
            todo.push_back(ps[i + 1])
            while todo.size():
                b = todo.back()
                todo.pop_back()
                a = todo.back()
                todo.pop_back()
                ra = self.find(a)
                rb = self.find(b)
                if ra == rb:
                    continue
                sa = self.struct_of(ra)
                sb = self.struct_of(rb)
                if sa < 0:
                    if sb >= 0 and self.occurs(ra, sb, stack):
                        return i // 2
                    self.parent[ra] = rb
                elif sb < 0:
                    if self.occurs(rb, sa, stack):
                        return i // 2
                    self.parent[rb] = ra
                else:
                    na = self._start[sa + 1] - self._start[sa]
                    if self._kind[sa] != self._kind[sb] or na != self._start[sb + 1] - self._start[sb]:
                        return i // 2
                    if self.occurs(ra, sb, stack) or self.occurs(rb, sa, stack):
                        return i // 2
                    self.parent[ra] = rb
                    self.struct_[rb] = sb
                    for k in range(na):
                        todo.push_back(self._kid[self._start[sa] + k])
                        todo.push_back(self._kid[self._start[sb] + k])
        return -1

    def first_failure(self, pairs):
        """Unify ``pairs[0]=pairs[1], pairs[2]=pairs[3], ...`` in order.

        Returns the index of the first equation that cannot be added, or -1.
        """
        return self.run(pairs)

    def solution(self, pairs):
        if self.run(pairs) != -1:
            raise ValueError("equations are not unifiable")
        cdef int n = self._kind.size()
        cdef int v, r, s
        out = []
        for v in range(n):
            r = self.find(v)
            s = self.struct_of(r)
            out.append(s if s >= 0 else -(r + 1))
        return out
