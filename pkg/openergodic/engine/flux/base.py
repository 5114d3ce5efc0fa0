from abc import ABC, abstractmethod
from typing import Any, Dict

from joblib import Parallel as JoblibParallel, delayed


class Node(ABC):
    """
    A base class for an operator in the verification flow.
    Each Node takes an input (signal, observable, partition, ...) and produces a result.
    """

    def __init__(self, name: str = None):
        self.name = name or self.__class__.__name__

    @abstractmethod
    def __call__(self, *args, **kwargs) -> Any:
        """
        Applies the operator.
        """
        pass

    def __str__(self):
        return f"{self.__class__.__name__}(name={self.name})"

    def __repr__(self):
        return self.__str__()

    def __rshift__(self, other):
        return Sequential(self, other)


class Sequential(Node):
    """
    A node that composes other nodes sequentially.
    """

    def __init__(self, *steps: Node, name: str = None):
        super().__init__(name or "Sequential")
        self.steps = steps

    def __call__(self, data: Any) -> Any:
        for step in self.steps:
            data = step(data)
        return data

    def __rshift__(self, other):
        return Sequential(*self.steps, other, name=self.name)


class Parallel(Node):
    """
    A node that runs multiple branches on the same input.
    Returns a dictionary with each branch's output, in branch declaration order.
    Branches run on joblib threads when n_jobs > 1.
    """

    def __init__(self, n_jobs: int = 1, **branches: Node):
        super().__init__("Parallel")
        self.n_jobs = n_jobs
        self.branches = branches

    def __call__(self, data: Any) -> Dict[str, Any]:
        if self.n_jobs <= 1 or len(self.branches) <= 1:
            return {name: branch(data) for name, branch in self.branches.items()}
        outputs = JoblibParallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(branch)(data) for branch in self.branches.values())
        return dict(zip(self.branches.keys(), outputs))
