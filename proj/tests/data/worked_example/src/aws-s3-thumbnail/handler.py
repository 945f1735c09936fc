import boto3
from PIL import Image

s3 = boto3.client("s3")

def handler(event, context):
    for record in event["Records"]:
        bucket = record["s3"]["bucket"]["name"]
        key = record["s3"]["object"]["key"]
        s3.download_file(bucket, key, "/tmp/in")
        img = Image.open("/tmp/in")
        img.thumbnail((128, 128))
        img.save("/tmp/out.png")
        s3.upload_file("/tmp/out.png", bucket + "-thumbnails", key)
