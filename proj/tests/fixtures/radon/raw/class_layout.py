class Account:
    '''Bank account.'''

    rate = 0.02  # yearly

    def __init__(self, owner):
        """
        Create an account.
        """
        self.owner = owner
        self.balance = 0

    # deposits ---------------------------------------------------------
    def deposit(self, amount):
        if amount <= 0:
            raise ValueError("amount")
        self.balance += amount



    def describe(self): """Docstring on the def line
        continues here."""; return self.owner
