class UnionFind:
    """Disjoint sets over ``0..n-1``; every class is represented by its least member."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return x
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return x

    def roots(self):
        return [self.find(i) for i in range(len(self.parent))]
