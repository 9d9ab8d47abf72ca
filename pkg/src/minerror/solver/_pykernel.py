"""Pure-Python union-find unifier over a hash-consed term graph.

Mirrors ``_ckernel.pyx`` exactly; the package imports whichever is available.
Node kinds: 0 is a type variable, anything else a constructor code, and two
constructor nodes clash when their codes differ.
"""


class TermGraph:
    def __init__(self):
        self.kind = []
        self.kids = []

    def add_node(self, kind, children):
        self.kind.append(kind)
        self.kids.append(tuple(children))
        return len(self.kind) - 1

    def __len__(self):
        return len(self.kind)

    def first_failure(self, pairs):
        """Unify ``pairs[0]=pairs[1], pairs[2]=pairs[3], ...`` in order.

        Returns the index of the first equation that cannot be added, or -1.
        """
        parent = {}
        struct = {}
        kind = self.kind
        kids = self.kids

        def find(x):
            root = x
            while True:
                p = parent.get(root)
                if p is None:
                    break
                root = p
            while x != root:
                nxt = parent[x]
                parent[x] = root
                x = nxt
            return root

        def occurs(var_root, node):
            seen = set()
            stack = [node]
            while stack:
                r = find(stack.pop())
                if r == var_root:
                    return True
                if r in seen:
                    continue
                seen.add(r)
                s = struct.get(r, r if kind[r] else -1)
                if s >= 0:
                    stack.extend(kids[s])
            return False

        for i in range(0, len(pairs), 2):
            todo = [(pairs[i], pairs[i + 1])]
            while todo:
                a, b = todo.pop()
                ra, rb = find(a), find(b)
                if ra == rb:
                    continue
                sa = struct.get(ra, ra if kind[ra] else -1)
                sb = struct.get(rb, rb if kind[rb] else -1)
                if sa < 0:
                    if sb >= 0 and occurs(ra, sb):
                        return i // 2
                    parent[ra] = rb
                elif sb < 0:
                    if occurs(rb, sa):
                        return i // 2
                    parent[rb] = ra
                else:
                    if kind[sa] != kind[sb] or len(kids[sa]) != len(kids[sb]):
                        return i // 2
                    # merging two structures can close a cycle through either one
                    if occurs(ra, sb) or occurs(rb, sa):
                        return i // 2
                    parent[ra] = rb
                    struct[rb] = sb
                    todo.extend(zip(kids[sa], kids[sb]))
        self._last = (parent, struct)
        return -1

    def solution(self, pairs):
        """Unify all pairs (which must succeed) and return ``rep`` with
        ``rep[n]`` = structure node of n's class, or -(root+1) for a variable class."""
        if self.first_failure(pairs) != -1:
            raise ValueError("equations are not unifiable")
        parent, struct = self._last
        rep = []
        for n in range(len(self.kind)):
            r = n
            while r in parent:
                r = parent[r]
            s = struct.get(r, r if self.kind[r] else -1)
            rep.append(s if s >= 0 else -(r + 1))
        return rep
