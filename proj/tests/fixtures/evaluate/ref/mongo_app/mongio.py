import pymongo

import settings


def collection():
    client = pymongo.MongoClient(settings.MONGO_URI)
    return client[settings.DATABASE][settings.COLLECTION]


def save(text, tags=()):
    doc = {"text": text, "tags": list(tags)}
    result = collection().insert_one(doc)
    return result.inserted_id


def notes(tag=None):
    query = {} if tag is None else {"tags": tag}
    return [doc["text"] for doc in collection().find(query)]
