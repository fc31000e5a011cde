"""
Validation reports for objects and morphisms.
"""


class ValidationMessage:
    """
    A message describing one failed or undecided clause.
    """

    WARNING = "warning"
    ERROR = "error"
    UNDETERMINED = "undetermined"

    TYPES = [WARNING, ERROR, UNDETERMINED]

    def __init__(self, message_type, message_text, clause=None, place=None, index=None):
        """
        Create a new message.

        Args:
            message_type (str): The type associated with this message. Must be included in `TYPES`.
            message_text (str): The textual message.
            clause (str): Stable identifier of the clause the message is about.
            place (str): Label of the offending place, if any.
            index (int): Offending filtration index, if any.
        """
        if message_type not in self.TYPES:
            raise TypeError("Unknown message_type: " + str(message_type))
        if not isinstance(message_text, str):
            raise TypeError("Message text must be a string")
        self.type = message_type
        self.text = message_text
        self.clause = clause
        self.place = place
        self.index = index

    def prefixed(self, prefix):
        """
        A copy of this message whose clause is namespaced by `prefix`.
        """
        clause = self.clause if not prefix else "{}.{}".format(prefix, self.clause)
        return ValidationMessage(self.type, self.text, clause=clause, place=self.place, index=self.index)

    def to_json(self):
        """
        Convert to a json-serializable representation.

        Returns:
            dict: A dict representation that is json-serializable.
        """
        return {
            "type": self.type,
            "text": self.text,
            "clause": self.clause,
            "place": self.place,
            "index": self.index,
        }

    def __repr__(self):
        return "ValidationMessage({!r}, {!r}, clause={!r})".format(self.type, self.text, self.clause)


class Validation:
    """
    The outcome of validating one object or morphism.

    An instance can be used as a boolean: `True` means no error messages
    (warnings and undetermined clauses do not make it false).
    """

    def __init__(self, subject):
        """
        Create a `Validation` instance.

        Args:
            subject: What was validated; reports name it by its type unless it is a string.
        """
        self.messages = []
        self.subject = subject

    @property
    def empty(self):
        """
        True iff this report has no messages at all.
        """
        return not self.messages

    @property
    def valid(self):
        """
        True iff no clause failed.
        """
        return not any(message.type == ValidationMessage.ERROR for message in self.messages)

    @property
    def decided(self):
        """
        True iff no clause was left undetermined.
        """
        return not any(message.type == ValidationMessage.UNDETERMINED for message in self.messages)

    def __bool__(self):
        return self.valid

    @property
    def clauses(self):
        """
        Sorted clause identifiers of the error messages.
        """
        return sorted({message.clause for message in self.messages if message.type == ValidationMessage.ERROR})

    def add(self, message):
        """
        Add a new validation message to this report.
        """
        if not isinstance(message, ValidationMessage):
            raise TypeError("Argument must of type ValidationMessage")
        self.messages.append(message)

    def add_messages(self, validation, prefix=None):
        """
        Add every message of another report, optionally namespacing their clauses.
        """
        if not isinstance(validation, Validation):
            raise TypeError("Argument must be of type Validation")
        self.messages.extend(message.prefixed(prefix) for message in validation.messages)

    def error(self, clause, text, **context):
        self.add(ValidationMessage(ValidationMessage.ERROR, text, clause=clause, **context))

    def warning(self, clause, text, **context):
        self.add(ValidationMessage(ValidationMessage.WARNING, text, clause=clause, **context))

    def undetermined(self, clause, text, **context):
        self.add(ValidationMessage(ValidationMessage.UNDETERMINED, text, clause=clause, **context))

    def to_json(self):
        """
        Convert to a json-serializable representation.
        """
        return {
            "subject": self.subject if isinstance(self.subject, str) else type(self.subject).__name__,
            "messages": [message.to_json() for message in self.messages],
            "valid": self.valid,
            "decided": self.decided,
        }
