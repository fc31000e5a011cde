"""
Test ogus/validation.py
"""
import unittest

import ddt
import pytest

from ogus.structures import OgusObject
from ogus.validation import Validation, ValidationMessage


@ddt.ddt
class ValidationMessageTest(unittest.TestCase):

    @ddt.data(
        ("fatal", "Frobenius is not invertible"),
        (ValidationMessage.ERROR, b"weight-purity"),
        (ValidationMessage.WARNING, None),
    )
    @ddt.unpack
    def test_rejects_bad_arguments(self, message_type, text):
        with pytest.raises(TypeError):
            ValidationMessage(message_type, text)

    def test_prefix_namespaces_the_clause(self):
        message = ValidationMessage(ValidationMessage.ERROR, "W_0 is not stable", clause='frobenius-weight-stable',
                                    place='v2', index=0)
        prefixed = message.prefixed('base')
        self.assertEqual(prefixed.clause, 'base.frobenius-weight-stable')
        self.assertEqual((prefixed.place, prefixed.index), ('v2', 0))
        self.assertEqual(message.prefixed(None).clause, 'frobenius-weight-stable')
        self.assertEqual(message.prefixed('eta').prefixed('base').clause, 'base.eta.frobenius-weight-stable')

    def test_to_json(self):
        message = ValidationMessage(ValidationMessage.UNDETERMINED, "No counterexample", clause='admissible',
                                    place='v3')
        self.assertEqual(message.to_json(), {
            "type": "undetermined", "text": "No counterexample", "clause": "admissible", "place": "v3", "index": None,
        })


class ValidationTest(unittest.TestCase):
    """
    Validity, decidedness and clause bookkeeping.
    """

    def test_empty_report(self):
        validation = Validation("tate")
        self.assertTrue(validation.empty)
        self.assertTrue(validation.valid)
        self.assertTrue(validation.decided)
        self.assertEqual(validation.clauses, [])

    def test_only_errors_invalidate(self):
        validation = Validation("tate")
        validation.warning('place-sets', "Place sets differ")
        validation.undetermined('admissible', "Search exhausted", place='v2')
        self.assertFalse(validation.empty)
        self.assertTrue(validation)
        self.assertFalse(validation.decided)
        self.assertEqual(validation.clauses, [])

        validation.error('hodge-decreasing', "Fil^1 is not inside Fil^0", index=1)
        self.assertFalse(validation)
        self.assertEqual(validation.clauses, ['hodge-decreasing'])

    def test_clauses_are_sorted_and_unique(self):
        validation = Validation("object")
        for place in ('v3', 'v2'):
            validation.error('weight-purity', "not pure at {}".format(place), place=place)
        validation.error('admissible', "t_H > t_N")
        self.assertEqual(validation.clauses, ['admissible', 'weight-purity'])

    def test_add_messages_with_prefix(self):
        base = Validation("base")
        base.error('admissible', "Not weakly admissible at v2", place='v2')
        base.warning('place-sets', "Place sets differ")
        outer = Validation("object")
        outer.error('cartesian', "A0 -> T x B0 is not an isomorphism")
        outer.add_messages(base, prefix='base')
        self.assertEqual(outer.clauses, ['base.admissible', 'cartesian'])
        self.assertEqual([message.type for message in outer.messages], ['error', 'error', 'warning'])
        self.assertEqual(base.clauses, ['admissible'])

    def test_add_requires_reports(self):
        validation = Validation("object")
        with pytest.raises(TypeError):
            validation.add("cartesian")
        with pytest.raises(TypeError):
            validation.add_messages(["cartesian"])

    def test_to_json(self):
        validation = Validation(OgusObject.zero())
        validation.undetermined('admissible', "Search exhausted", place='v5')
        self.assertEqual(validation.to_json(), {
            "subject": "OgusObject",
            "messages": [{
                "type": "undetermined", "text": "Search exhausted", "clause": "admissible", "place": "v5",
                "index": None,
            }],
            "valid": True,
            "decided": False,
        })
        self.assertEqual(Validation("tate.json").to_json()["subject"], "tate.json")
